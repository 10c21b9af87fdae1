//! Bicomplex generalized hypergeometric series
//!
//! ```text
//! pFq(alpha; beta; Z) = sum_n prod (alpha_i)_n / prod (beta_j)_n * Z^n / n!
//! ```
//!
//! The series is summed on each idempotent component independently. The
//! region of convergence is the whole space for `p <= q`, the open ball
//! `B_h(0, 1)` for `p = q + 1` (plus its boundary when
//! `eta_s = Re(sum beta_s - sum alpha_s) > 0` on both components), and only
//! `Z = 0` for `p > q + 1`. Numerators at nonpositive integers make the
//! component a polynomial, valid for every argument.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::CDd;
use crate::gamma::near_nonpositive_integer;
use crate::numbers::{BiComplex, Hyperbolic};

/// Terms must stay below `tol * |sum|` for this many consecutive steps.
pub const STOP_RUN: usize = 3;
/// Minimum number of terms before the stopping rule may fire.
pub const MIN_TERMS: usize = 8;
pub const DEFAULT_MAX_TERMS: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-16;
/// `| |z| - 1 |` below this counts as the unit circle.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Smallest `eta` accepted for summation on the unit circle.
pub const BOUNDARY_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PfqParams {
    alphas: Vec<BiComplex>,
    betas: Vec<BiComplex>,
}

/// Parameters of one idempotent component.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentParams {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl PfqParams {
    /// Fails when a denominator component is a nonpositive integer.
    pub fn new(alphas: Vec<BiComplex>, betas: Vec<BiComplex>) -> Result<Self> {
        for (j, b) in betas.iter().enumerate() {
            for s in [1u8, 2] {
                if let Some(n) = near_nonpositive_integer(b.component(s)) {
                    return Err(Error::InvalidParams(format!(
                        "beta_{} has component {s} at the nonpositive integer {n}",
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { alphas, betas })
    }

    pub fn p(&self) -> usize {
        self.alphas.len()
    }

    pub fn q(&self) -> usize {
        self.betas.len()
    }

    pub fn alphas(&self) -> &[BiComplex] {
        &self.alphas
    }

    pub fn betas(&self) -> &[BiComplex] {
        &self.betas
    }

    pub fn component(&self, s: u8) -> ComponentParams {
        ComponentParams {
            a: self.alphas.iter().map(|a| a.component(s)).collect(),
            b: self.betas.iter().map(|b| b.component(s)).collect(),
        }
    }

    /// `(eta_1, eta_2)` with `eta_s = Re(sum beta_s - sum alpha_s)`.
    pub fn eta(&self) -> Hyperbolic {
        let e = |s| self.component(s).eta();
        Hyperbolic::from_idempotent(e(1), e(2))
    }

    /// `min(eta_1, eta_2)`; positive exactly when
    /// `Re(sum b1 - sum a1) > |Im(sum b2 - sum a2)|` in cartesian parts.
    pub fn margin(&self) -> f64 {
        let e = self.eta();
        e.h1.min(e.h2)
    }

    /// All numerators shifted by `da`, all denominators by `db`.
    pub fn shifted(&self, da: f64, db: f64) -> Result<Self> {
        Self::new(self.alphas.iter().map(|a| *a + da).collect(), self.betas.iter().map(|b| *b + db).collect())
    }

    /// `prod alpha_i / prod beta_j`.
    pub fn leading_ratio(&self) -> Result<BiComplex> {
        let num: BiComplex = self.alphas.iter().copied().product();
        let den: BiComplex = self.betas.iter().copied().product();
        num.checked_div(den)
    }
}

impl ComponentParams {
    pub fn eta(&self) -> f64 {
        let sb: Complex64 = self.b.iter().sum();
        let sa: Complex64 = self.a.iter().sum();
        (sb - sa).re
    }

    /// Degree of the polynomial when some numerator is a nonpositive integer.
    pub fn terminating_degree(&self) -> Option<usize> {
        self.a.iter().filter_map(|a| near_nonpositive_integer(*a)).map(|n| (-n) as usize).min()
    }

    /// `c_{n+1} / c_n` without the argument.
    pub fn coefficient_ratio(&self, n: usize) -> Complex64 {
        let nf = n as f64;
        let mut r = Complex64::new(1.0 / (nf + 1.0), 0.0);
        for a in &self.a {
            r *= a + nf;
        }
        for b in &self.b {
            r /= b + nf;
        }
        r
    }

    /// Numerator and denominator of [`Self::coefficient_ratio`] in
    /// double-double, the shifts `a + n` held exactly.
    pub fn ratio_parts_dd(&self, n: usize) -> (CDd, CDd) {
        let nf = n as f64;
        let num = self.a.iter().fold(CDd::ONE, |acc, a| acc * CDd::shifted(*a, nf));
        let den = self.b.iter().fold(CDd::from_c64(Complex64::new(nf + 1.0, 0.0)), |acc, b| acc * CDd::shifted(*b, nf));
        (num, den)
    }

    /// `c_0 .. c_{n-1}` of `sum c_n z^n`, by the ratio recurrence.
    pub fn coefficients(&self, n: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(n);
        let mut c = Complex64::new(1.0, 0.0);
        for k in 0..n {
            out.push(c);
            c *= self.coefficient_ratio(k);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceKind {
    Entire,
    UnitBall,
    UnitBallBoundaryConvergent,
    DivergentEverywhere,
}

impl ConvergenceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Entire => "entire",
            Self::UnitBall => "unit-ball",
            Self::UnitBallBoundaryConvergent => "unit-ball-boundary-convergent",
            Self::DivergentEverywhere => "divergent-everywhere",
        }
    }
}

impl std::fmt::Display for ConvergenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceClass {
    pub kind: ConvergenceKind,
    pub eta: Hyperbolic,
    pub margin: f64,
}

pub fn classify(params: &PfqParams) -> ConvergenceClass {
    let (p, q) = (params.p(), params.q());
    let margin = params.margin();
    let kind = if p <= q {
        ConvergenceKind::Entire
    } else if p == q + 1 {
        if margin > BOUNDARY_MARGIN {
            ConvergenceKind::UnitBallBoundaryConvergent
        } else {
            ConvergenceKind::UnitBall
        }
    } else {
        ConvergenceKind::DivergentEverywhere
    };
    ConvergenceClass { kind, eta: params.eta(), margin }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_terms: DEFAULT_MAX_TERMS }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEval {
    pub value: BiComplex,
    pub terms_used: [usize; 2],
    pub tail_bound: Hyperbolic,
    pub class: ConvergenceKind,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComponentSum {
    pub value: Complex64,
    pub terms: usize,
    pub tail: f64,
}

/// Checks that `z` lies where the component series converges.
pub fn check_component_domain(cp: &ComponentParams, z: Complex64, s: u8) -> Result<()> {
    if z == Complex64::new(0.0, 0.0) || cp.terminating_degree().is_some() {
        return Ok(());
    }
    let (p, q) = (cp.a.len(), cp.b.len());
    if p <= q {
        return Ok(());
    }
    if p > q + 1 {
        return Err(Error::Domain(format!("{p}F{q} converges only at Z = 0 (component {s} is {z})")));
    }
    let r = z.norm();
    if r < 1.0 - BOUNDARY_TOL {
        return Ok(());
    }
    if r <= 1.0 + BOUNDARY_TOL {
        let eta = cp.eta();
        if eta > BOUNDARY_MARGIN {
            return Ok(());
        }
        return Err(Error::Domain(format!(
            "component {s} on the unit circle with eta = {eta} (needs > {BOUNDARY_MARGIN})"
        )));
    }
    Err(Error::Domain(format!("component {s} has |z| = {r} > 1")))
}

/// Largest `n * sum |t_k| / |sum|` accepted from the double-precision pass;
/// beyond it the series is summed again in double-double.
pub const CANCELLATION_LIMIT: f64 = 1e3;

/// Term arithmetic for one summation pass.
trait Term: Copy + std::ops::Add<Output = Self> {
    fn one() -> Self;
    fn step(self, cp: &ComponentParams, z: Complex64, n: usize) -> Self;
    fn norm(self) -> f64;
    fn value(self) -> Complex64;
}

impl Term for Complex64 {
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn step(self, cp: &ComponentParams, z: Complex64, n: usize) -> Self {
        self * cp.coefficient_ratio(n) * z
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn value(self) -> Complex64 {
        self
    }
}

impl Term for CDd {
    fn one() -> Self {
        CDd::ONE
    }
    fn step(self, cp: &ComponentParams, z: Complex64, n: usize) -> Self {
        let (num, den) = cp.ratio_parts_dd(n);
        self * num * CDd::from_c64(z) / den
    }
    fn norm(self) -> f64 {
        CDd::norm(self)
    }
    fn value(self) -> Complex64 {
        self.to_c64()
    }
}

struct Pass {
    sum: Complex64,
    n: usize,
    last: f64,
    ratio: f64,
    /// `n * sum |t_k| / |sum|`, the relative error in units of eps.
    cancellation: f64,
}

fn sum_pass<T: Term>(
    cp: &ComponentParams,
    z: Complex64,
    cfg: &SeriesConfig,
) -> std::result::Result<Pass, (usize, Complex64)> {
    let mut term = T::one();
    let mut sum = T::one();
    let mut abs = 1.0;
    if let Some(deg) = cp.terminating_degree() {
        for n in 0..deg {
            term = term.step(cp, z, n);
            sum = sum + term;
            abs += term.norm();
        }
        let cancellation = (deg + 1) as f64 * abs / sum.norm();
        return Ok(Pass { sum: sum.value(), n: deg, last: 0.0, ratio: 0.0, cancellation });
    }
    let (mut run, mut n, mut ratio, mut t) = (0, 0, 0.0, 1.0);
    loop {
        if n + 1 >= cfg.max_terms {
            return Err((n + 1, sum.value()));
        }
        let prev = t;
        term = term.step(cp, z, n);
        n += 1;
        sum = sum + term;
        let total = sum.norm();
        if !total.is_finite() {
            return Err((n + 1, sum.value()));
        }
        t = term.norm();
        abs += t;
        if prev > 0.0 {
            ratio = t / prev;
        }
        if t <= cfg.tol * total {
            run += 1;
        } else {
            run = 0;
        }
        if run >= STOP_RUN && n >= MIN_TERMS {
            let cancellation = n as f64 * abs / total;
            return Ok(Pass { sum: sum.value(), n, last: t, ratio, cancellation });
        }
    }
}

/// Sums one idempotent component; the caller checks the domain. A
/// double-precision pass is kept unless cancellation between large terms
/// ([`CANCELLATION_LIMIT`]) calls for a double-double pass.
pub fn sum_component(
    cp: &ComponentParams,
    z: Complex64,
    cfg: &SeriesConfig,
) -> std::result::Result<ComponentSum, (usize, Complex64)> {
    if z == Complex64::new(0.0, 0.0) && cp.terminating_degree().is_none() {
        return Ok(ComponentSum { value: Complex64::new(1.0, 0.0), terms: 1, tail: 0.0 });
    }
    let mut pass = sum_pass::<Complex64>(cp, z, cfg)?;
    if pass.cancellation.is_nan() || pass.cancellation > CANCELLATION_LIMIT {
        pass = sum_pass::<CDd>(cp, z, cfg)?;
    }
    let Pass { sum, n, last: t, ratio, .. } = pass;
    if cp.terminating_degree().is_some() {
        return Ok(ComponentSum { value: sum, terms: n + 1, tail: 0.0 });
    }
    let geometric = |r: f64| if r < 1.0 { t * r / (1.0 - r) } else { f64::INFINITY };
    let tail = if cp.a.len() == cp.b.len() + 1 {
        // terms behave like n^(-eta-1) |z|^n
        let eta = cp.eta();
        let power = if eta > 0.0 { t * (n as f64 + eta + 1.0) / eta } else { f64::INFINITY };
        geometric(z.norm()).min(power)
    } else {
        geometric(ratio)
    };
    Ok(ComponentSum { value: sum, terms: n + 1, tail })
}

/// Evaluates `pFq(alpha; beta; Z)`.
pub fn pfq(params: &PfqParams, z: BiComplex, cfg: &SeriesConfig) -> Result<SeriesEval> {
    let class = classify(params).kind;
    let mut parts = [ComponentSum { value: Complex64::default(), terms: 0, tail: 0.0 }; 2];
    let mut failed = None;
    for s in [1u8, 2] {
        let cp = params.component(s);
        let zs = z.component(s);
        check_component_domain(&cp, zs, s)?;
        match sum_component(&cp, zs, cfg) {
            Ok(r) => parts[s as usize - 1] = r,
            Err((terms, partial)) => {
                parts[s as usize - 1].value = partial;
                failed = Some(failed.map_or(terms, |t: usize| t.max(terms)));
            }
        }
    }
    let value = BiComplex::from_idempotent(parts[0].value, parts[1].value);
    if let Some(terms) = failed {
        return Err(Error::NoConvergence { terms, partial: value });
    }
    Ok(SeriesEval {
        value,
        terms_used: [parts[0].terms, parts[1].terms],
        tail_bound: Hyperbolic::from_idempotent(parts[0].tail, parts[1].tail),
        class,
    })
}

/// [`pfq`] with the default configuration, value only.
pub fn pfq_value(params: &PfqParams, z: BiComplex) -> Result<BiComplex> {
    pfq(params, z, &SeriesConfig::default()).map(|e| e.value)
}

pub fn hyp1f1(a: BiComplex, b: BiComplex, z: BiComplex) -> Result<BiComplex> {
    pfq_value(&PfqParams::new(vec![a], vec![b])?, z)
}

pub fn hyp2f1(a: BiComplex, b: BiComplex, c: BiComplex, z: BiComplex) -> Result<BiComplex> {
    pfq_value(&PfqParams::new(vec![a, b], vec![c])?, z)
}

pub fn hyp1f0(a: BiComplex, z: BiComplex) -> Result<BiComplex> {
    pfq_value(&PfqParams::new(vec![a], vec![])?, z)
}

/// Reference complex pFq. Coefficients are rebuilt from separately
/// accumulated Pochhammer ratios paired so each factor stays bounded
/// (`(a_1)_n / n!`, then `(a_i)_n / (b_{i-1})_n`, then leftovers), multiplied
/// by an independently computed power `z^n`. Uses the stopping rule of
/// [`pfq`]; `None` when the sum fails to settle within `max_terms`.
pub fn oracle_pfq_complex(a: &[Complex64], b: &[Complex64], z: Complex64, cfg: &SeriesConfig) -> Option<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    // factor k is (a_k)_n / (d_k)_n with d = (1, b_1, b_2, ...); missing
    // entries count as 1. Factors, powers and sums are double-double.
    let dens: Vec<Complex64> = std::iter::once(one).chain(b.iter().copied()).collect();
    let pairs: Vec<(Option<Complex64>, Option<Complex64>)> =
        (0..a.len().max(dens.len())).map(|k| (a.get(k).copied(), dens.get(k).copied())).collect();
    let mut factors = vec![CDd::ONE; pairs.len()];
    let zd = CDd::from_c64(z);
    let mut power = CDd::ONE;
    let mut sum = CDd::ONE;
    let mut run = 0;
    for n in 1..cfg.max_terms {
        let k = (n - 1) as f64;
        for (f, (x, y)) in factors.iter_mut().zip(&pairs) {
            if let Some(x) = x {
                *f = *f * CDd::shifted(*x, k);
            }
            if let Some(y) = y {
                *f = *f / CDd::shifted(*y, k);
            }
        }
        power = power * zd;
        let coef = factors.iter().fold(CDd::ONE, |acc, f| acc * *f);
        if coef.to_c64() == Complex64::new(0.0, 0.0) && a.iter().any(|ai| near_nonpositive_integer(*ai).is_some()) {
            return Some(sum.to_c64());
        }
        let term = coef * power;
        sum = sum + term;
        let total = sum.norm();
        if !total.is_finite() {
            return None;
        }
        if term.norm() <= cfg.tol * total {
            run += 1;
        } else {
            run = 0;
        }
        if run >= STOP_RUN && n >= MIN_TERMS {
            return Some(sum.to_c64());
        }
    }
    None
}

/// Partial-sum Cauchy test on one component, ignoring the region check:
/// sums up to `budget` terms and reports whether every partial sum in the
/// last `window` terms lies within `threshold` of the latest one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyOutcome {
    pub converged: bool,
    pub terms: usize,
    pub window_spread: f64,
    /// `n |t_n|` at the final term; bounded away from zero signals divergence.
    pub scaled_last_term: f64,
}

pub fn cauchy_test(cp: &ComponentParams, z: Complex64, window: usize, threshold: f64, budget: usize) -> CauchyOutcome {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut recent: std::collections::VecDeque<Complex64> = std::collections::VecDeque::with_capacity(window + 1);
    recent.push_back(sum);
    let mut spread = f64::INFINITY;
    let mut n = 0;
    while n < budget {
        term *= cp.coefficient_ratio(n) * z;
        n += 1;
        sum += term;
        if !sum.is_finite() {
            break;
        }
        recent.push_back(sum);
        if recent.len() > window + 1 {
            recent.pop_front();
        }
        if recent.len() == window + 1 && n % window == 0 {
            spread = recent.iter().map(|s| (s - sum).norm()).fold(0.0, f64::max);
            if spread < threshold {
                return CauchyOutcome {
                    converged: true,
                    terms: n,
                    window_spread: spread,
                    scaled_last_term: n as f64 * term.norm(),
                };
            }
        }
    }
    CauchyOutcome { converged: false, terms: n, window_spread: spread, scaled_last_term: n as f64 * term.norm() }
}

/// Direct probe used for region plots: whether the component series
/// settles under the usual stopping rule within `budget` terms.
pub fn probe_convergence(cp: &ComponentParams, z: Complex64, budget: usize) -> bool {
    let cfg = SeriesConfig { tol: DEFAULT_TOL, max_terms: budget };
    sum_component(cp, z, &cfg).is_ok()
}
