//! Double-double complex arithmetic for recurrence checks at the ulp level.
//!
//! Sums and products use the error-free transformations `two_sum` and
//! `two_prod` (the latter through `f64::mul_add`), so a product of a few
//! factors carries roughly 100 bits.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    Dd { hi: s, lo: e }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd { hi: p, lo: a.mul_add(b, -p) }
}

impl Dd {
    pub const fn new(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }

    /// `a + b` held exactly.
    pub fn sum_exact(a: f64, b: f64) -> Self {
        two_sum(a, b)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ONE: Self = Self { re: Dd::new(1.0), im: Dd::new(0.0) };

    pub fn from_c64(w: Complex64) -> Self {
        Self { re: Dd::new(w.re), im: Dd::new(w.im) }
    }

    /// `w + n` with no rounding.
    pub fn shifted(w: Complex64, n: f64) -> Self {
        Self { re: Dd::sum_exact(w.re, n), im: Dd::new(w.im) }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// `self / d` rounded to double, with one correction step so the result
    /// is within about half an ulp per part.
    pub fn div_to_c64(self, d: Self) -> Complex64 {
        let dc = d.to_c64();
        let q0 = self.to_c64() / dc;
        let r = self - d * Self::from_c64(q0);
        q0 + r.to_c64() / dc
    }

    pub fn norm(self) -> f64 {
        self.to_c64().norm()
    }
}

/// `m 2^e` with `1 <= |m| < 2` (or `m = 0`), for magnitudes beyond the
/// double range. Scaling by the exponent is exact, so a product costs one
/// rounding of the mantissas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtFloat {
    pub m: f64,
    pub e: i64,
}

impl ExtFloat {
    pub const ONE: Self = Self { m: 1.0, e: 0 };

    pub fn from_f64(v: f64) -> Self {
        Self { m: v, e: 0 }.normalized()
    }

    fn normalized(self) -> Self {
        if self.m == 0.0 || !self.m.is_finite() {
            return Self { m: self.m, e: 0 };
        }
        let k = self.m.abs().log2().floor() as i32;
        let mut m = self.m * 2f64.powi(-k);
        let mut e = self.e + k as i64;
        if m.abs() >= 2.0 {
            m /= 2.0;
            e += 1;
        } else if m.abs() < 1.0 {
            m *= 2.0;
            e -= 1;
        }
        Self { m, e }
    }

    pub fn mul_f64(self, v: f64) -> Self {
        self * Self::from_f64(v)
    }

    /// Square root of a nonnegative value.
    pub fn sqrt(self) -> Self {
        if self.e % 2 == 0 {
            Self { m: self.m.sqrt(), e: self.e / 2 }.normalized()
        } else {
            Self { m: (2.0 * self.m).sqrt(), e: (self.e - 1) / 2 }.normalized()
        }
    }

    /// The ratio `self / o` as a double.
    pub fn ratio(self, o: Self) -> f64 {
        scale2(self.m / o.m, self.e - o.e)
    }

    /// The value as a double; infinite or zero outside the double range.
    pub fn to_f64(self) -> f64 {
        scale2(self.m, self.e)
    }

    pub fn ln(self) -> f64 {
        self.m.ln() + self.e as f64 * std::f64::consts::LN_2
    }

    /// `self * 2^-e_ref` with an exact shift; used to compare neighbours.
    pub fn mantissa_at(self, e_ref: i64) -> f64 {
        scale2(self.m, self.e - e_ref)
    }
}

impl Add for Dd {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let s = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(s.hi, s.lo + t.lo)
    }
}

impl Neg for Dd {
    type Output = Self;

    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        self + -o
    }
}

impl Mul for Dd {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        let p = two_prod(self.hi, o.hi);
        let lo = p.lo + (self.hi * o.lo + self.lo * o.hi);
        quick_two_sum(p.hi, lo)
    }
}

impl Add for CDd {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for CDd {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        Self { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for CDd {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        Self { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

impl Div for CDd {
    type Output = Self;

    /// `self / d` to double-double accuracy by two correction steps.
    fn div(self, d: Self) -> Self {
        let dc = d.to_c64();
        let q0 = Self::from_c64(self.to_c64() / dc);
        let r = self - d * q0;
        let q1 = Self::from_c64(r.to_c64() / dc);
        let r = r - d * q1;
        q0 + q1 + Self::from_c64(r.to_c64() / dc)
    }
}

impl Mul for ExtFloat {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        Self { m: self.m * o.m, e: self.e + o.e }.normalized()
    }
}

impl Div for ExtFloat {
    type Output = Self;

    fn div(self, o: Self) -> Self {
        Self { m: self.m / o.m, e: self.e - o.e }.normalized()
    }
}

fn scale2(m: f64, e: i64) -> f64 {
    // split so each factor stays a normal power of two
    let e = e.clamp(-2200, 2200) as i32;
    let half = e / 2;
    m * 2f64.powi(half) * 2f64.powi(e - half)
}

fn pow10(k: i64) -> ExtFloat {
    let mut base = ExtFloat::from_f64(if k < 0 { 0.1 } else { 10.0 });
    let mut n = k.unsigned_abs();
    let mut acc = ExtFloat::ONE;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        n >>= 1;
    }
    acc
}

impl std::fmt::Display for ExtFloat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let v = self.to_f64();
        if v.is_finite() && (v == 0.0 || v.abs() > f64::MIN_POSITIVE) {
            return write!(f, "{v:e}");
        }
        let k = (self.m.abs().log10() + self.e as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let mut mant = (*self / pow10(k)).to_f64();
        let mut k = k;
        if mant.abs() >= 10.0 {
            mant /= 10.0;
            k += 1;
        } else if mant.abs() < 1.0 {
            mant *= 10.0;
            k -= 1;
        }
        write!(f, "{mant}e{k}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_keeps_low_bits() {
        let a = Dd::new(1.0 + f64::EPSILON);
        let p = a * a;
        assert_eq!(p.hi, 1.0 + 2.0 * f64::EPSILON);
        assert_eq!(p.lo, f64::EPSILON * f64::EPSILON);
        let s = Dd::sum_exact(1e16, 1.0);
        assert_eq!((s - Dd::new(1e16)).to_f64(), 1.0);
    }

    #[test]
    fn complex_division_is_correctly_rounded_on_sample() {
        let n = CDd::from_c64(Complex64::new(1.0, 2.0));
        let d = CDd::from_c64(Complex64::new(3.0, -1.0));
        let q = n.div_to_c64(d);
        // (1 + 2i)/(3 - i) = (1 + 7i)/10
        assert_eq!(q, Complex64::new(0.1, 0.7));
    }

    #[test]
    fn extended_range() {
        let mut f = ExtFloat::ONE;
        for k in 1..=256 {
            f = f.mul_f64(k as f64);
        }
        assert!(f.to_f64().is_infinite());
        // ln(256!) frozen at 30 digits
        assert!((f.ln() - 1_167.257_278_562_880_2).abs() < 1e-9);
        assert!(f.to_string().starts_with("8.5781777534284"), "{f}");
        assert!(f.to_string().ends_with("e506"));
        let g = f.mul_f64(257.0);
        assert_eq!(g.ratio(f), 257.0);
        let s = ExtFloat::from_f64(18.0).sqrt();
        assert!((s.to_f64() - 18f64.sqrt()).abs() < 1e-15);
        assert_eq!(ExtFloat::from_f64(0.375).to_string(), "3.75e-1");
        assert_eq!(ExtFloat::from_f64(12.0), ExtFloat { m: 1.5, e: 3 });
    }
}
