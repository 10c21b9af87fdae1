//! Bicomplex numbers `Z = z + i2 z'` with `z, z'` complex in `i1`.
//!
//! Values are held in the idempotent basis
//!
//! ```text
//! Z = z1 e1 + z2 e2,   z1 = z - i z',   z2 = z + i z',
//! e1 = (1 + k)/2,      e2 = (1 - k)/2,  k = i1 i2
//! ```
//!
//! so every ring operation acts on `(z1, z2)` independently and the
//! cartesian pair is derived on demand. Hyperbolic numbers (real idempotent
//! components) carry the order and the norm used for balls.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative size below which an idempotent component counts as zero.
pub const NULL_CONE_REL: f64 = 1e-14;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BiComplex {
    z1: Complex64,
    z2: Complex64,
}

impl BiComplex {
    pub const ZERO: Self = Self::from_idempotent(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    pub const ONE: Self = Self::from_idempotent(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    pub const I1: Self = Self::from_idempotent(Complex64::new(0.0, 1.0), Complex64::new(0.0, 1.0));
    pub const I2: Self = Self::from_idempotent(Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0));
    pub const K: Self = Self::from_idempotent(Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0));
    pub const E1: Self = Self::from_idempotent(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    pub const E2: Self = Self::from_idempotent(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));

    /// Builds `re1 + i2 re2`.
    pub fn new(re1: Complex64, re2: Complex64) -> Self {
        Self { z1: re1 - I * re2, z2: re1 + I * re2 }
    }

    /// Builds `a + b i1 + c i2 + d k`.
    pub fn from_parts(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(Complex64::new(a, b), Complex64::new(c, d))
    }

    pub const fn from_idempotent(z1: Complex64, z2: Complex64) -> Self {
        Self { z1, z2 }
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_complex(Complex64::new(x, 0.0))
    }

    /// Embeds a complex number as `w + i2 0`.
    pub fn from_complex(w: Complex64) -> Self {
        Self { z1: w, z2: w }
    }

    pub fn re1(&self) -> Complex64 {
        (self.z1 + self.z2) * 0.5
    }

    pub fn re2(&self) -> Complex64 {
        I * (self.z1 - self.z2) * 0.5
    }

    pub fn idem1(&self) -> Complex64 {
        self.z1
    }

    pub fn idem2(&self) -> Complex64 {
        self.z2
    }

    pub fn split(&self) -> (Complex64, Complex64) {
        (self.z1, self.z2)
    }

    /// Idempotent component `s` (1 or 2).
    pub fn component(&self, s: u8) -> Complex64 {
        match s {
            1 => self.z1,
            2 => self.z2,
            _ => panic!("idempotent component must be 1 or 2, got {s}"),
        }
    }

    /// Real coordinates `(a, b, c, d)` of `a + b i1 + c i2 + d k`.
    pub fn parts(&self) -> [f64; 4] {
        let (r1, r2) = (self.re1(), self.re2());
        [r1.re, r1.im, r2.re, r2.im]
    }

    pub fn map(self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { z1: f(self.z1), z2: f(self.z2) }
    }

    pub fn try_map(self, f: impl Fn(u8, Complex64) -> Result<Complex64>) -> Result<Self> {
        Ok(Self { z1: f(1, self.z1)?, z2: f(2, self.z2)? })
    }

    /// `conj(z) + i2 conj(z')`.
    pub fn bar(self) -> Self {
        Self { z1: self.z2.conj(), z2: self.z1.conj() }
    }

    /// `z - i2 z'`.
    pub fn tilde(self) -> Self {
        Self { z1: self.z2, z2: self.z1 }
    }

    /// `conj(z) - i2 conj(z')`, the composition of bar and tilde.
    pub fn star(self) -> Self {
        Self { z1: self.z1.conj(), z2: self.z2.conj() }
    }

    /// `sqrt(|z|^2 + |z'|^2)`.
    pub fn norm_euclid(&self) -> f64 {
        (0.5 * (self.z1.norm_sqr() + self.z2.norm_sqr())).sqrt()
    }

    /// `|z1| e1 + |z2| e2`.
    pub fn norm_h(&self) -> Hyperbolic {
        Hyperbolic::from_idempotent(self.z1.norm(), self.z2.norm())
    }

    pub fn is_finite(&self) -> bool {
        self.z1.is_finite() && self.z2.is_finite()
    }

    fn zero_threshold(&self) -> f64 {
        NULL_CONE_REL * self.norm_euclid().max(1.0)
    }

    /// True when some idempotent component vanishes, i.e. `z^2 + z'^2 = 0`.
    pub fn in_null_cone(&self) -> bool {
        let t = self.zero_threshold();
        self.z1.norm() < t || self.z2.norm() < t
    }

    /// Nonzero element of the null cone.
    pub fn is_zero_divisor(&self) -> bool {
        let t = self.zero_threshold();
        self.in_null_cone() && (self.z1.norm() >= t || self.z2.norm() >= t)
    }

    /// Both idempotent components real.
    pub fn is_hyperbolic(&self) -> bool {
        self.z1.im == 0.0 && self.z2.im == 0.0
    }

    /// Hyperbolic with both idempotent components nonnegative.
    pub fn is_in_dplus(&self) -> bool {
        self.is_hyperbolic() && self.z1.re >= 0.0 && self.z2.re >= 0.0
    }

    pub fn inverse(self) -> Result<Self> {
        if self.in_null_cone() {
            return Err(Error::NullCone);
        }
        Ok(Self { z1: self.z1.inv(), z2: self.z2.inv() })
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        if rhs.in_null_cone() {
            return Err(Error::NullCone);
        }
        Ok(self / rhs)
    }

    pub fn exp(self) -> Self {
        self.map(Complex64::exp)
    }

    /// Principal logarithm per idempotent component.
    pub fn ln(self) -> Result<Self> {
        if self.in_null_cone() {
            return Err(Error::NullCone);
        }
        self.try_map(|s, w| if on_branch_cut(w) { Err(Error::BranchCut { component: s }) } else { Ok(w.ln()) })
    }

    /// Principal square root per idempotent component.
    pub fn sqrt(self) -> Self {
        self.map(Complex64::sqrt)
    }

    pub fn powi(self, n: i32) -> Self {
        self.map(|w| w.powi(n))
    }

    /// `self^w` on principal branches; integer exponents use repeated
    /// multiplication and accept any base.
    pub fn pow(self, w: Self) -> Result<Self> {
        if let Some(n) = w.as_integer() {
            if n < 0 && self.in_null_cone() {
                return Err(Error::NullCone);
            }
            return Ok(self.powi(n));
        }
        if self.in_null_cone() {
            return Err(Error::NullCone);
        }
        let pc = |s: u8, b: Complex64, e: Complex64| {
            if on_branch_cut(b) {
                Err(Error::BranchCut { component: s })
            } else {
                Ok((e * b.ln()).exp())
            }
        };
        Ok(Self { z1: pc(1, self.z1, w.z1)?, z2: pc(2, self.z2, w.z2)? })
    }

    /// Integer value when both components are the same exact integer.
    pub fn as_integer(&self) -> Option<i32> {
        let w = self.z1;
        if w == self.z2 && w.im == 0.0 && w.re.fract() == 0.0 && w.re.abs() <= i32::MAX as f64 {
            Some(w.re as i32)
        } else {
            None
        }
    }

    /// Text form `(x)e1+(y)e2` that re-parses to the identical value.
    pub fn idempotent_string(&self) -> String {
        format!("({})e1+({})e2", fmt_complex(self.z1), fmt_complex(self.z2))
    }
}

fn on_branch_cut(w: Complex64) -> bool {
    w.im == 0.0 && w.re < 0.0
}

fn fmt_signed(out: &mut String, v: f64, unit: &str) {
    out.push(if v.is_sign_negative() { '-' } else { '+' });
    out.push_str(&format!("{}{}", v.abs(), unit));
}

fn fmt_complex(w: Complex64) -> String {
    let mut s = format!("{}", w.re);
    fmt_signed(&mut s, w.im, "i1");
    s
}

impl fmt::Display for BiComplex {
    /// Cartesian form `a+bi1+ci2+dk`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.parts();
        let mut s = format!("{a}");
        fmt_signed(&mut s, b, "i1");
        fmt_signed(&mut s, c, "i2");
        fmt_signed(&mut s, d, "k");
        f.write_str(&s)
    }
}

impl From<f64> for BiComplex {
    fn from(x: f64) -> Self {
        Self::from_real(x)
    }
}

impl From<Complex64> for BiComplex {
    fn from(w: Complex64) -> Self {
        Self::from_complex(w)
    }
}

impl Add for BiComplex {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self { z1: self.z1 + r.z1, z2: self.z2 + r.z2 }
    }
}

impl Sub for BiComplex {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self { z1: self.z1 - r.z1, z2: self.z2 - r.z2 }
    }
}

impl Mul for BiComplex {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Self { z1: self.z1 * r.z1, z2: self.z2 * r.z2 }
    }
}

/// Componentwise quotient; null-cone divisors give non-finite components.
/// Use [`BiComplex::checked_div`] for a checked version.
impl Div for BiComplex {
    type Output = Self;
    fn div(self, r: Self) -> Self {
        Self { z1: self.z1 / r.z1, z2: self.z2 / r.z2 }
    }
}

impl Neg for BiComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self { z1: -self.z1, z2: -self.z2 }
    }
}

impl Mul<f64> for BiComplex {
    type Output = Self;
    fn mul(self, r: f64) -> Self {
        Self { z1: self.z1 * r, z2: self.z2 * r }
    }
}

impl Mul<Complex64> for BiComplex {
    type Output = Self;
    fn mul(self, r: Complex64) -> Self {
        Self { z1: self.z1 * r, z2: self.z2 * r }
    }
}

impl Add<f64> for BiComplex {
    type Output = Self;
    fn add(self, r: f64) -> Self {
        Self { z1: self.z1 + r, z2: self.z2 + r }
    }
}

impl Sub<f64> for BiComplex {
    type Output = Self;
    fn sub(self, r: f64) -> Self {
        Self { z1: self.z1 - r, z2: self.z2 - r }
    }
}

impl AddAssign for BiComplex {
    fn add_assign(&mut self, r: Self) {
        *self = *self + r;
    }
}

impl SubAssign for BiComplex {
    fn sub_assign(&mut self, r: Self) {
        *self = *self - r;
    }
}

impl MulAssign for BiComplex {
    fn mul_assign(&mut self, r: Self) {
        *self = *self * r;
    }
}

impl std::iter::Sum for BiComplex {
    fn sum<T: Iterator<Item = Self>>(iter: T) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl std::iter::Product for BiComplex {
    fn product<T: Iterator<Item = Self>>(iter: T) -> Self {
        iter.fold(Self::ONE, |a, b| a * b)
    }
}

#[derive(Serialize, Deserialize)]
struct BiComplexRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    re1: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    re2: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    idem1: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    idem2: Option<Complex64>,
}

/// Serialized as `{"re1":[a,b],"re2":[c,d],"idem1":[..],"idem2":[..]}`; the
/// idempotent pair is exact and wins on input when present.
impl Serialize for BiComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BiComplexRepr { re1: Some(self.re1()), re2: Some(self.re2()), idem1: Some(self.z1), idem2: Some(self.z2) }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BiComplex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = BiComplexRepr::deserialize(d)?;
        match (r.idem1, r.idem2, r.re1, r.re2) {
            (Some(a), Some(b), _, _) => Ok(Self::from_idempotent(a, b)),
            (_, _, Some(a), b) => Ok(Self::new(a, b.unwrap_or_default())),
            _ => Err(serde::de::Error::custom("expected re1/re2 or idem1/idem2")),
        }
    }
}

/// A hyperbolic number `x + y k`, held as its idempotent pair
/// `(x + y) e1 + (x - y) e2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Hyperbolic {
    pub h1: f64,
    pub h2: f64,
}

/// Outcome of the strict hyperbolic comparison `a <_h b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HOrder {
    Less,
    NotLess,
    Incomparable,
}

impl Hyperbolic {
    pub const ZERO: Self = Self { h1: 0.0, h2: 0.0 };

    /// `x + y k`.
    pub fn new(x: f64, y: f64) -> Self {
        Self { h1: x + y, h2: x - y }
    }

    pub const fn from_idempotent(h1: f64, h2: f64) -> Self {
        Self { h1, h2 }
    }

    pub fn splat(v: f64) -> Self {
        Self { h1: v, h2: v }
    }

    pub fn x(&self) -> f64 {
        0.5 * (self.h1 + self.h2)
    }

    pub fn y(&self) -> f64 {
        0.5 * (self.h1 - self.h2)
    }

    pub fn component(&self, s: u8) -> f64 {
        match s {
            1 => self.h1,
            2 => self.h2,
            _ => panic!("idempotent component must be 1 or 2, got {s}"),
        }
    }

    pub fn to_bicomplex(self) -> BiComplex {
        BiComplex::from_idempotent(Complex64::new(self.h1, 0.0), Complex64::new(self.h2, 0.0))
    }

    /// Both idempotent components strictly positive.
    pub fn is_positive(&self) -> bool {
        self.h1 > 0.0 && self.h2 > 0.0
    }

    pub fn max_component(&self) -> f64 {
        self.h1.max(self.h2)
    }

    /// Componentwise `a <= b` on both idempotent components.
    pub fn le(&self, b: &Self) -> bool {
        self.h1 <= b.h1 && self.h2 <= b.h2
    }

    pub fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Self { h1: f(self.h1), h2: f(self.h2) }
    }
}

impl Add for Hyperbolic {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self { h1: self.h1 + r.h1, h2: self.h2 + r.h2 }
    }
}

impl Mul for Hyperbolic {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Self { h1: self.h1 * r.h1, h2: self.h2 * r.h2 }
    }
}

impl Mul<f64> for Hyperbolic {
    type Output = Self;
    fn mul(self, r: f64) -> Self {
        Self { h1: self.h1 * r, h2: self.h2 * r }
    }
}

impl fmt::Display for Hyperbolic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})e1+({})e2", self.h1, self.h2)
    }
}

/// `a <_h b`: less when both idempotent components are strictly smaller,
/// not-less when neither is, incomparable otherwise.
pub fn h_less(a: &Hyperbolic, b: &Hyperbolic) -> HOrder {
    match (a.h1 < b.h1, a.h2 < b.h2) {
        (true, true) => HOrder::Less,
        (false, false) => HOrder::NotLess,
        _ => HOrder::Incomparable,
    }
}

/// Open hyperbolic ball `{ Z : |Z - center|_h <_h radius }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HBall {
    center: BiComplex,
    radius: Hyperbolic,
}

impl HBall {
    pub fn new(center: BiComplex, radius: Hyperbolic) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::InvalidParams(format!("ball radius {radius} is not in D+ \\ 0")));
        }
        Ok(Self { center, radius })
    }

    pub fn unit() -> Self {
        Self { center: BiComplex::ZERO, radius: Hyperbolic::splat(1.0) }
    }

    pub fn center(&self) -> BiComplex {
        self.center
    }

    pub fn radius(&self) -> Hyperbolic {
        self.radius
    }

    pub fn contains(&self, z: &BiComplex) -> bool {
        h_less(&(*z - self.center).norm_h(), &self.radius) == HOrder::Less
    }
}

impl FromStr for BiComplex {
    type Err = Error;

    /// Parses expressions over `+ - * /` and parentheses with implicit
    /// multiplication. Atoms are decimal numbers and the units `i1` (or `i`),
    /// `i2` (or `j`), `k`, `e1`, `e2`. A decimal exponent needs an explicit
    /// sign (`2.5e-3`) so that `0.5e1` reads as `0.5 * e1`.
    fn from_str(s: &str) -> Result<Self> {
        let tokens = lex(s)?;
        let mut p = Parser { tokens, pos: 0, len: s.len() };
        let v = p.expr()?;
        if let Some((pos, _)) = p.tokens.get(p.pos) {
            return Err(Error::Parse { pos: *pos, msg: "unexpected trailing input".into() });
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Unit(BiComplex),
    Op(char),
    Open,
    Close,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, msg: &str| Error::Parse { pos, msg: msg.to_string() };
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            let signed_exp = i + 2 < chars.len()
                && matches!(chars[i].1, 'e' | 'E')
                && matches!(chars[i + 1].1, '+' | '-')
                && chars[i + 2].1.is_ascii_digit();
            let plain_exp = i + 1 < chars.len() && chars[i].1 == 'E' && chars[i + 1].1.is_ascii_digit();
            let has_exp = signed_exp || plain_exp;
            if has_exp {
                i += if signed_exp { 2 } else { 1 };
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
            }
            let end = chars.get(i).map_or(s.len(), |c| c.0);
            let text = &s[chars[start].0..end];
            let v: f64 = text.parse().map_err(|_| err(pos, &format!("bad number '{text}'")))?;
            out.push((pos, Tok::Num(v)));
            continue;
        }
        if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric()) {
                i += 1;
            }
            let end = chars.get(i).map_or(s.len(), |c| c.0);
            let word = &s[chars[start].0..end];
            let tok = match word {
                "i" | "i1" | "i\u{2081}" => Tok::Unit(BiComplex::I1),
                "j" | "i2" | "i\u{2082}" => Tok::Unit(BiComplex::I2),
                "k" => Tok::Unit(BiComplex::K),
                "e1" | "e\u{2081}" => Tok::Unit(BiComplex::E1),
                "e2" | "e\u{2082}" => Tok::Unit(BiComplex::E2),
                "inf" | "infinity" => Tok::Num(f64::INFINITY),
                "nan" | "NaN" => Tok::Num(f64::NAN),
                _ => return Err(err(pos, &format!("unknown symbol '{word}'"))),
            };
            out.push((pos, tok));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' => Tok::Op(c),
            '(' => Tok::Open,
            ')' => Tok::Close,
            _ => return Err(err(pos, &format!("unexpected character '{c}'"))),
        };
        out.push((pos, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.1)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.len, |t| t.0)
    }

    fn expr(&mut self) -> Result<BiComplex> {
        let mut v = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let r = self.term()?;
            v = if c == '+' { v + r } else { v - r };
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<BiComplex> {
        let mut v = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    v *= self.unary()?;
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let at = self.here();
                    let d = self.unary()?;
                    v = v
                        .checked_div(d)
                        .map_err(|_| Error::Parse { pos: at, msg: "division by a null-cone element".into() })?;
                }
                Some(Tok::Num(_) | Tok::Unit(_) | Tok::Open) => v *= self.primary()?,
                _ => return Ok(v),
            }
        }
    }

    fn unary(&mut self) -> Result<BiComplex> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<BiComplex> {
        let at = self.here();
        let tok = self.peek().cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Num(v)) => Ok(BiComplex::from_real(v)),
            Some(Tok::Unit(u)) => Ok(u),
            Some(Tok::Open) => {
                let v = self.expr()?;
                match self.peek() {
                    Some(Tok::Close) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    _ => Err(Error::Parse { pos: self.here(), msg: "expected ')'".into() }),
                }
            }
            Some(_) => Err(Error::Parse { pos: at, msg: "expected a number, unit or '('".into() }),
            None => Err(Error::Parse { pos: at, msg: "unexpected end of input".into() }),
        }
    }
}

/// Parses a comma-separated list of bicomplex literals; blank input gives
/// an empty list. Commas inside parentheses do not split.
pub fn parse_list(s: &str) -> Result<Vec<BiComplex>> {
    let mut items = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                items.push((start, &s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    items.push((start, &s[start..]));
    if items.len() == 1 && items[0].1.trim().is_empty() {
        return Ok(Vec::new());
    }
    items
        .into_iter()
        .map(|(off, t)| {
            t.parse::<BiComplex>().map_err(|e| match e {
                Error::Parse { pos, msg } => Error::Parse { pos: pos + off, msg },
                other => other,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cart_mul(a: BiComplex, b: BiComplex) -> BiComplex {
        let (z, zp) = (a.re1(), a.re2());
        let (w, wp) = (b.re1(), b.re2());
        BiComplex::new(z * w - zp * wp, zp * w + z * wp)
    }

    #[test]
    fn units_satisfy_defining_relations() {
        let one = BiComplex::ONE;
        assert_eq!(BiComplex::I1 * BiComplex::I1, -one);
        assert_eq!(BiComplex::I2 * BiComplex::I2, -one);
        assert_eq!(BiComplex::K * BiComplex::K, one);
        assert_eq!(BiComplex::I1 * BiComplex::I2, BiComplex::K);
        assert_eq!(BiComplex::I2 * BiComplex::I1, BiComplex::K);
        assert_eq!(BiComplex::E1 + BiComplex::E2, one);
        assert_eq!(BiComplex::E1 - BiComplex::E2, BiComplex::K);
        assert_eq!(BiComplex::E1 * BiComplex::E2, BiComplex::ZERO);
        assert_eq!(BiComplex::E1 * BiComplex::E1, BiComplex::E1);
        assert_eq!(BiComplex::E2 * BiComplex::E2, BiComplex::E2);
        assert_eq!(BiComplex::K.parts(), [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(BiComplex::I2.parts(), [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(BiComplex::E1.parts(), [0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn idempotent_split_of_sample() {
        let z = BiComplex::from_parts(1.0, 2.0, 3.0, 4.0);
        assert_eq!(z.split(), (c(5.0, -1.0), c(-3.0, 5.0)));
        assert_eq!(z.re1(), c(1.0, 2.0));
        assert_eq!(z.re2(), c(3.0, 4.0));
    }

    #[test]
    fn e1_times_e2_is_zero_divisor_pair() {
        assert!(BiComplex::E1.is_zero_divisor());
        assert!(BiComplex::E2.in_null_cone());
        assert!(!BiComplex::ZERO.is_zero_divisor());
        assert!(BiComplex::ZERO.in_null_cone());
        assert_eq!(BiComplex::E1.inverse(), Err(Error::NullCone));
        assert!(!BiComplex::ONE.in_null_cone());
    }

    #[test]
    fn null_cone_matches_z2_plus_zp2() {
        // 1 + i1 i2 = 2 e1
        let z = BiComplex::new(c(1.0, 0.0), c(0.0, 1.0));
        assert!(z.is_zero_divisor());
        assert_eq!(z.re1() * z.re1() + z.re2() * z.re2(), c(0.0, 0.0));
    }

    #[test]
    fn hyperbolic_order_and_balls() {
        let a = Hyperbolic::from_idempotent(0.3, 0.4);
        let b = Hyperbolic::splat(1.0);
        assert_eq!(h_less(&a, &b), HOrder::Less);
        assert_eq!(h_less(&b, &a), HOrder::NotLess);
        let e1 = Hyperbolic::from_idempotent(1.0, 0.0);
        let e2 = Hyperbolic::from_idempotent(0.0, 1.0);
        assert_eq!(h_less(&e1, &e2), HOrder::Incomparable);
        let ball = HBall::unit();
        assert!(ball.contains(&BiComplex::from_idempotent(c(0.3, 0.0), c(0.0, 0.4))));
        assert!(!ball.contains(&BiComplex::from_idempotent(c(1.2, 0.0), c(0.5, 0.0))));
        assert!(!ball.contains(&BiComplex::E1));
        assert!(HBall::new(BiComplex::ZERO, Hyperbolic::from_idempotent(1.0, 0.0)).is_err());
        let h = Hyperbolic::new(2.0, 0.5);
        assert_eq!((h.h1, h.h2), (2.5, 1.5));
        assert_eq!((h.x(), h.y()), (2.0, 0.5));
    }

    #[test]
    fn conjugations_in_cartesian_form() {
        let z = BiComplex::from_parts(1.0, 2.0, 3.0, 4.0);
        assert_eq!(z.bar().parts(), [1.0, -2.0, 3.0, -4.0]);
        assert_eq!(z.tilde().parts(), [1.0, 2.0, -3.0, -4.0]);
        assert_eq!(z.star().parts(), [1.0, -2.0, -3.0, 4.0]);
        // Z Z* is hyperbolic-positive: |z1|^2 e1 + |z2|^2 e2
        let p = z * z.star();
        assert!(p.is_in_dplus());
        assert_eq!(p.norm_h(), Hyperbolic::from_idempotent(26.0, 34.0));
    }

    #[test]
    fn euclidean_norm_matches_cartesian() {
        let z = BiComplex::from_parts(1.0, 2.0, 3.0, 4.0);
        assert!((z.norm_euclid() - 30f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pow_integer_and_branch_cut() {
        let z = BiComplex::from_idempotent(c(-2.0, 0.0), c(0.5, 0.5));
        assert_eq!(z.pow(BiComplex::from_real(2.0)).unwrap(), z * z);
        assert_eq!(z.pow(BiComplex::from_real(0.5)), Err(Error::BranchCut { component: 1 }));
        assert_eq!(BiComplex::E1.pow(BiComplex::from_real(0.5)), Err(Error::NullCone));
        let w = BiComplex::from_idempotent(c(4.0, 0.0), c(9.0, 0.0));
        let r = w.pow(BiComplex::from_real(0.5)).unwrap();
        assert!((r.idem1() - c(2.0, 0.0)).norm() < 1e-15);
        assert!((r.idem2() - c(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn parses_cartesian_and_idempotent_literals() {
        let z: BiComplex = "1+2i1+3i2+4k".parse().unwrap();
        assert_eq!(z, BiComplex::from_parts(1.0, 2.0, 3.0, 4.0));
        let z: BiComplex = "(0.3+0.1i1)e1+(0.2-0.4i1)e2".parse().unwrap();
        assert_eq!(z, BiComplex::from_idempotent(c(0.3, 0.1), c(0.2, -0.4)));
        let z: BiComplex = "0.5e1 + 0.25e2".parse().unwrap();
        assert_eq!(z, BiComplex::from_idempotent(c(0.5, 0.0), c(0.25, 0.0)));
        let z: BiComplex = "2.5e-3".parse().unwrap();
        assert_eq!(z, BiComplex::from_real(2.5e-3));
        let z: BiComplex = "-i + 2*j".parse().unwrap();
        assert_eq!(z, BiComplex::from_parts(0.0, -1.0, 2.0, 0.0));
        let z: BiComplex = "1/(2e1+4e2)".parse().unwrap();
        assert_eq!(z, BiComplex::from_idempotent(c(0.5, 0.0), c(0.25, 0.0)));
    }

    #[test]
    fn parse_errors_carry_positions() {
        match "1 + 2q".parse::<BiComplex>() {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!("(1+i".parse::<BiComplex>().is_err());
        assert!("1 +".parse::<BiComplex>().is_err());
        assert!("1/e1".parse::<BiComplex>().is_err());
        assert!("".parse::<BiComplex>().is_err());
    }

    #[test]
    fn list_parsing() {
        let v = parse_list("1, 2i1, (1,)").unwrap_err();
        assert!(matches!(v, Error::Parse { .. }));
        let v = parse_list("1, (0.5+i)e1+2e2").unwrap();
        assert_eq!(v.len(), 2);
        assert!(parse_list("  ").unwrap().is_empty());
    }

    #[test]
    fn json_round_trip_and_alternate_form() {
        let z = BiComplex::from_idempotent(c(0.1, -0.3), c(1e-300, 7.0));
        let s = serde_json::to_string(&z).unwrap();
        let back: BiComplex = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z);
        let back: BiComplex = serde_json::from_str(r#"{"re1":[1,2],"re2":[3,4]}"#).unwrap();
        assert_eq!(back, BiComplex::from_parts(1.0, 2.0, 3.0, 4.0));
    }

    fn finite() -> impl Strategy<Value = f64> {
        -1e3..1e3f64
    }

    fn bicomplex() -> impl Strategy<Value = BiComplex> {
        (finite(), finite(), finite(), finite()).prop_map(|(a, b, c, d)| BiComplex::from_parts(a, b, c, d))
    }

    fn close(a: BiComplex, b: BiComplex, ulps: f64) -> bool {
        let scale = a.norm_euclid().max(b.norm_euclid()).max(1e-300);
        (a - b).norm_euclid() <= ulps * f64::EPSILON * scale
    }

    proptest! {
        #[test]
        fn ring_axioms(a in bicomplex(), b in bicomplex(), c in bicomplex()) {
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!(a * b, b * a);
            let s = (a + b) * c;
            let t = a * c + b * c;
            for k in [1u8, 2] {
                let bound = 4.0 * f64::EPSILON * (a.component(k).norm() + b.component(k).norm()) * c.component(k).norm();
                prop_assert!((s.component(k) - t.component(k)).norm() <= bound + 1e-300);
            }
            let l = (a * b) * c;
            let r = a * (b * c);
            for s in [1u8, 2] {
                let d = (l.component(s) - r.component(s)).norm();
                prop_assert!(d <= 4.0 * f64::EPSILON * a.component(s).norm() * b.component(s).norm() * c.component(s).norm() * 2.0 + 1e-300);
            }
        }

        #[test]
        fn cartesian_product_matches_componentwise(a in bicomplex(), b in bicomplex()) {
            let p = a * b;
            let q = cart_mul(a, b);
            let scale = a.norm_euclid() * b.norm_euclid();
            prop_assert!((p - q).norm_euclid() <= 16.0 * f64::EPSILON * scale + 1e-300);
        }

        #[test]
        fn cartesian_round_trip(a in finite(), b in finite(), c in finite(), d in finite()) {
            let z = BiComplex::from_parts(a, b, c, d);
            let [a2, b2, c2, d2] = z.parts();
            let tol = 4.0 * f64::EPSILON * z.norm_euclid();
            prop_assert!((a - a2).abs() <= tol && (b - b2).abs() <= tol);
            prop_assert!((c - c2).abs() <= tol && (d - d2).abs() <= tol);
        }

        #[test]
        fn conjugations_are_involutions(z in bicomplex(), w in bicomplex()) {
            prop_assert_eq!(z.bar().bar(), z);
            prop_assert_eq!(z.tilde().tilde(), z);
            prop_assert_eq!(z.star().star(), z);
            prop_assert_eq!(z.bar().tilde(), z.star());
            prop_assert_eq!((z * w).star(), z.star() * w.star());
            prop_assert_eq!((z * w).bar(), z.bar() * w.bar());
            prop_assert_eq!((z * w).tilde(), z.tilde() * w.tilde());
        }

        #[test]
        fn euclid_norm_product_inequality(a in bicomplex(), b in bicomplex()) {
            prop_assert!((a * b).norm_euclid() <= (1.0 + 1e-12) * 2f64.sqrt() * a.norm_euclid() * b.norm_euclid());
        }

        #[test]
        fn inverse_outside_null_cone(a in bicomplex()) {
            prop_assume!(!a.in_null_cone());
            let one = a * a.inverse().unwrap();
            prop_assert!((one - BiComplex::ONE).norm_euclid() < 1e-14);
        }

        #[test]
        fn idempotent_text_round_trips(a in any::<f64>(), b in any::<f64>(), c in any::<f64>(), d in any::<f64>()) {
            prop_assume!([a, b, c, d].iter().all(|v| v.is_finite()));
            let z = BiComplex::from_idempotent(Complex64::new(a, b), Complex64::new(c, d));
            let back: BiComplex = z.idempotent_string().parse().unwrap();
            prop_assert_eq!(back.split(), z.split());
        }

        #[test]
        fn cartesian_text_round_trips_to_rounding(z in bicomplex()) {
            let back: BiComplex = z.to_string().parse().unwrap();
            prop_assert!(close(back, z, 4.0));
        }
    }
}
