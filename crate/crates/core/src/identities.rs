//! Identities satisfied by bicomplex pFq: quadratic (even/odd) transforms,
//! the terminating 3F2 at unit argument, derivative and holomorphy
//! relations, contiguous relations under shifts `M = m e1 + n e2`, and the
//! generalized hypergeometric differential equation
//!
//! ```text
//! d/dZ prod_j (Z d/dZ + beta_j - 1) Y - prod_i (Z d/dZ + alpha_i) Y = 0.
//! ```
//!
//! Residuals are reported per idempotent component as
//! `|lhs - rhs| / max(1, |lhs|, |rhs|)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::CDd;
use crate::gamma::{bc_gamma, bc_pochhammer};
use crate::hyper::{check_component_domain, pfq_value, ComponentParams, PfqParams, SeriesConfig, MIN_TERMS, STOP_RUN};
use crate::numbers::{BiComplex, Hyperbolic};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub lhs: BiComplex,
    pub rhs: BiComplex,
    pub residual: Hyperbolic,
    pub tolerance: Hyperbolic,
    pub passed: bool,
}

fn scaled_residual(l: Complex64, r: Complex64) -> f64 {
    let d = (l - r).norm();
    if d == 0.0 {
        return 0.0;
    }
    d / 1f64.max(l.norm()).max(r.norm())
}

impl IdentityReport {
    pub fn compare(lhs: BiComplex, rhs: BiComplex, tol: f64) -> Self {
        let residual = Hyperbolic::from_idempotent(
            scaled_residual(lhs.idem1(), rhs.idem1()),
            scaled_residual(lhs.idem2(), rhs.idem2()),
        );
        Self::with_bound(lhs, rhs, residual, Hyperbolic::splat(tol))
    }

    pub fn with_bound(lhs: BiComplex, rhs: BiComplex, residual: Hyperbolic, tolerance: Hyperbolic) -> Self {
        let passed = residual.le(&tolerance) && residual.h1.is_finite() && residual.h2.is_finite();
        Self { lhs, rhs, residual, tolerance, passed }
    }

    pub fn max_residual(&self) -> f64 {
        self.residual.max_component()
    }
}

fn halves(v: &[BiComplex], shift: f64) -> Vec<BiComplex> {
    v.iter().map(|a| (*a + shift) * 0.5).collect()
}

/// `2p F 2q+1` parameters of the even-part transform.
pub fn quad_even_params(params: &PfqParams) -> Result<PfqParams> {
    let mut a = halves(params.alphas(), 0.0);
    a.extend(halves(params.alphas(), 1.0));
    let mut b = vec![BiComplex::from_real(0.5)];
    b.extend(halves(params.betas(), 0.0));
    b.extend(halves(params.betas(), 1.0));
    PfqParams::new(a, b)
}

/// `2p F 2q+1` parameters of the odd-part transform.
pub fn quad_odd_params(params: &PfqParams) -> Result<PfqParams> {
    let mut a = halves(params.alphas(), 1.0);
    a.extend(halves(params.alphas(), 2.0));
    let mut b = vec![BiComplex::from_real(1.5)];
    b.extend(halves(params.betas(), 1.0));
    b.extend(halves(params.betas(), 2.0));
    PfqParams::new(a, b)
}

/// Argument `Z^2 / 4^(q + 1 - p)` of the quadratic transforms.
pub fn quad_argument(params: &PfqParams, z: BiComplex) -> BiComplex {
    let e = params.p() as i32 - params.q() as i32 - 1;
    z * z * 4f64.powi(e)
}

/// `2 * 2pF2q+1(...; Z^2/4^(q+1-p)) = pFq(Z) + pFq(-Z)`.
pub fn quad_even(params: &PfqParams, z: BiComplex) -> Result<IdentityReport> {
    let lhs = pfq_value(&quad_even_params(params)?, quad_argument(params, z))? * 2.0;
    let rhs = pfq_value(params, z)? + pfq_value(params, -z)?;
    Ok(IdentityReport::compare(lhs, rhs, DEFAULT_TOL))
}

/// `2 Z prod alpha / prod beta * 2pF2q+1(...; Z^2/4^(q+1-p)) = pFq(Z) - pFq(-Z)`.
pub fn quad_odd(params: &PfqParams, z: BiComplex) -> Result<IdentityReport> {
    let lead = params.leading_ratio()?;
    let lhs = z * lead * pfq_value(&quad_odd_params(params)?, quad_argument(params, z))? * 2.0;
    let rhs = pfq_value(params, z)? - pfq_value(params, -z)?;
    Ok(IdentityReport::compare(lhs, rhs, DEFAULT_TOL))
}

/// `3F2(-n, a1, a2; b, 1 - b + a1 + a2 - n; 1)` against
/// `(b - a1)_n (b - a2)_n / ((b)_n (b - a1 - a2)_n)`.
pub fn saalschutz(n: usize, a1: BiComplex, a2: BiComplex, b: BiComplex) -> Result<IdentityReport> {
    let nn = n as f64;
    let params = PfqParams::new(vec![BiComplex::from_real(-nn), a1, a2], vec![b, BiComplex::ONE - b + a1 + a2 - nn])?;
    let lhs = pfq_value(&params, BiComplex::ONE)?;
    let num = bc_pochhammer(b - a1, n) * bc_pochhammer(b - a2, n);
    let den = bc_pochhammer(b, n) * bc_pochhammer(b - a1 - a2, n);
    let rhs = num.checked_div(den)?;
    Ok(IdentityReport::compare(lhs, rhs, DEFAULT_TOL))
}

fn component_derivative(cp: &ComponentParams, z: Complex64, k: usize, cfg: &SeriesConfig) -> Option<Complex64> {
    // d_0 = c_k k!, d_{m+1} / d_m = ratio(m + k) (m + k + 1) / (m + 1)
    let mut d = Complex64::new(1.0, 0.0);
    for j in 0..k {
        d *= cp.coefficient_ratio(j) * (j + 1) as f64;
    }
    let limit = cp.terminating_degree();
    if limit.is_some_and(|deg| deg < k) {
        return Some(Complex64::new(0.0, 0.0));
    }
    let mut sum = d;
    let mut term = d;
    let mut run = 0;
    for m in 0..cfg.max_terms {
        if limit.is_some_and(|deg| m + k >= deg) {
            return Some(sum);
        }
        term *= cp.coefficient_ratio(m + k) * ((m + k + 1) as f64 / (m + 1) as f64) * z;
        sum += term;
        if !sum.is_finite() {
            return None;
        }
        if term.norm() <= cfg.tol * sum.norm() {
            run += 1;
        } else {
            run = 0;
        }
        if run >= STOP_RUN && m + 1 >= MIN_TERMS {
            return Some(sum);
        }
    }
    None
}

/// `d^k/dZ^k pFq` by term-wise differentiation of the series.
pub fn derivative_series(params: &PfqParams, z: BiComplex, k: usize) -> Result<BiComplex> {
    let cfg = SeriesConfig::default();
    z.try_map(|s, zs| {
        let cp = params.component(s);
        check_component_domain(&cp, zs, s)?;
        component_derivative(&cp, zs, k, &cfg)
            .ok_or(Error::NoConvergence { terms: cfg.max_terms, partial: BiComplex::ZERO })
    })
}

/// `d^k/dZ^k pFq(alpha; beta; Z) = prod (alpha)_k / prod (beta)_k pFq(alpha + k; beta + k; Z)`.
pub fn derivative_relation(params: &PfqParams, z: BiComplex, k: usize) -> Result<IdentityReport> {
    let lhs = derivative_series(params, z, k)?;
    let num: BiComplex = params.alphas().iter().map(|a| bc_pochhammer(*a, k)).product();
    let den: BiComplex = params.betas().iter().map(|b| bc_pochhammer(*b, k)).product();
    let kf = k as f64;
    let rhs = num.checked_div(den)? * pfq_value(&params.shifted(kf, kf)?, z)?;
    Ok(IdentityReport::compare(lhs, rhs, DEFAULT_TOL))
}

/// Which bicomplex variable the holomorphy check differentiates in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrVariable {
    Argument,
    Alpha(usize),
    Beta(usize),
}

/// Central-difference residuals of the bicomplex Cauchy-Riemann equations
/// `df1/dx = df2/dy` and `df1/dy = -df2/dx`, where `F = f1 + i2 f2` and the
/// variable is `x + i2 y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrResiduals {
    pub eq1: Complex64,
    pub eq2: Complex64,
    pub h: f64,
    /// Largest partial derivative magnitude, for scaling.
    pub scale: f64,
}

impl CrResiduals {
    pub fn magnitude(&self) -> f64 {
        self.eq1.norm().max(self.eq2.norm())
    }
}

fn with_variable(params: &PfqParams, z: BiComplex, var: CrVariable, v: BiComplex) -> Result<BiComplex> {
    match var {
        CrVariable::Argument => pfq_value(params, v),
        CrVariable::Alpha(i) => {
            let mut a = params.alphas().to_vec();
            *a.get_mut(i).ok_or(Error::Index(i))? = v;
            pfq_value(&PfqParams::new(a, params.betas().to_vec())?, z)
        }
        CrVariable::Beta(j) => {
            let mut b = params.betas().to_vec();
            *b.get_mut(j).ok_or(Error::Index(j))? = v;
            pfq_value(&PfqParams::new(params.alphas().to_vec(), b)?, z)
        }
    }
}

pub fn cr_residuals(params: &PfqParams, z: BiComplex, var: CrVariable, h: f64) -> Result<CrResiduals> {
    let base = match var {
        CrVariable::Argument => z,
        CrVariable::Alpha(i) => *params.alphas().get(i).ok_or(Error::Index(i))?,
        CrVariable::Beta(j) => *params.betas().get(j).ok_or(Error::Index(j))?,
    };
    let (x, y) = (base.re1(), base.re2());
    let eval = |x: Complex64, y: Complex64| -> Result<(Complex64, Complex64)> {
        let f = with_variable(params, z, var, BiComplex::new(x, y))?;
        Ok((f.re1(), f.re2()))
    };
    // steps taken along the real axis and made exactly representable
    let step = |w: Complex64| {
        let up = w.re + h;
        let down = w.re - h;
        (Complex64::new(up, w.im), Complex64::new(down, w.im), up - down)
    };
    let (xp, xm, dx) = step(x);
    let (yp, ym, dy) = step(y);
    let (f1xp, f2xp) = eval(xp, y)?;
    let (f1xm, f2xm) = eval(xm, y)?;
    let (f1yp, f2yp) = eval(x, yp)?;
    let (f1ym, f2ym) = eval(x, ym)?;
    let d1x = (f1xp - f1xm) / dx;
    let d2x = (f2xp - f2xm) / dx;
    let d1y = (f1yp - f1ym) / dy;
    let d2y = (f2yp - f2ym) / dy;
    let scale = [d1x, d2x, d1y, d2y].iter().map(|d| d.norm()).fold(0.0, f64::max);
    Ok(CrResiduals { eq1: d1x - d2y, eq2: d1y + d2x, h, scale })
}

/// Holomorphy check packaged as a report: `lhs = df1/dx + i2 df1/dy` and
/// `rhs = df2/dy - i2 df2/dx` agree exactly when both equations hold.
pub fn cauchy_riemann_check(
    params: &PfqParams,
    z: BiComplex,
    var: CrVariable,
    h: f64,
    tol: f64,
) -> Result<IdentityReport> {
    let r = cr_residuals(params, z, var, h)?;
    let scale = r.scale.max(1.0);
    let residual = BiComplex::new(r.eq1, r.eq2).norm_h() * (1.0 / scale);
    let lhs = BiComplex::new(r.eq1, r.eq2);
    Ok(IdentityReport::with_bound(lhs, BiComplex::ZERO, residual, Hyperbolic::splat(tol)))
}

/// Shift `M = m e1 + n e2` with nonnegative integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shift {
    pub m: u32,
    pub n: u32,
}

impl Shift {
    pub fn new(m: u32, n: u32) -> Self {
        Self { m, n }
    }

    pub fn as_bicomplex(&self) -> BiComplex {
        BiComplex::from_idempotent(Complex64::new(self.m as f64, 0.0), Complex64::new(self.n as f64, 0.0))
    }

    /// `M-bar = n e1 + m e2`.
    pub fn conj(&self) -> BiComplex {
        self.as_bicomplex().bar()
    }
}

fn binomial(m: u32, s: u32) -> f64 {
    (0..s).fold(1.0, |acc, k| acc * (m - k) as f64 / (k + 1) as f64)
}

fn replace(v: &[BiComplex], i: usize, x: BiComplex) -> Vec<BiComplex> {
    let mut out = v.to_vec();
    out[i] = x;
    out
}

fn pochhammer_ratio(params: &PfqParams, s: usize) -> Result<BiComplex> {
    let num: BiComplex = params.alphas().iter().map(|a| bc_pochhammer(*a, s)).product();
    let den: BiComplex = params.betas().iter().map(|b| bc_pochhammer(*b, s)).product();
    num.checked_div(den)
}

fn need(params: &PfqParams, p: usize, q: usize) -> Result<()> {
    if params.p() < p || params.q() < q {
        return Err(Error::Precondition(format!("needs p >= {p} and q >= {q}")));
    }
    Ok(())
}

/// `F(alpha1 + M) + F(alpha1 + M-bar)` against
/// `sum_{s<=m} C(m,s) Gamma(alpha1)/Gamma(alpha1+s) prod(alpha)_s/prod(beta)_s Z^s F(alpha+s; beta+s)`
/// plus the same sum over `n`.
pub fn contiguous_alpha_plus(params: &PfqParams, z: BiComplex, shift: Shift) -> Result<IdentityReport> {
    need(params, 1, 0)?;
    let a = params.alphas();
    let b = params.betas().to_vec();
    let lhs = pfq_value(&PfqParams::new(replace(a, 0, a[0] + shift.as_bicomplex()), b.clone())?, z)?
        + pfq_value(&PfqParams::new(replace(a, 0, a[0] + shift.conj()), b)?, z)?;
    let g = bc_gamma(a[0])?;
    let side = |count: u32| -> Result<BiComplex> {
        let mut acc = BiComplex::ZERO;
        for s in 0..=count {
            let sf = s as f64;
            let w = g.checked_div(bc_gamma(a[0] + sf)?)? * pochhammer_ratio(params, s as usize)?;
            acc += w * z.powi(s as i32) * pfq_value(&params.shifted(sf, sf)?, z)? * binomial(count, s);
        }
        Ok(acc)
    };
    let rhs = side(shift.m)? + side(shift.n)?;
    Ok(IdentityReport::compare(lhs, rhs, DEFAULT_TOL))
}

/// `F(alpha1 - M) + F(alpha1 - M-bar)` against
/// `sum_{s<=m} C(m,s) prod_{i>=2}(alpha_i)_s/prod(beta)_s (-Z)^s F(alpha1, alpha_{i>=2}+s; beta+s)`
/// plus the same sum over `n`.
pub fn contiguous_alpha_minus(params: &PfqParams, z: BiComplex, shift: Shift) -> Result<IdentityReport> {
    need(params, 1, 0)?;
    let a = params.alphas();
    let b = params.betas().to_vec();
    let lhs = pfq_value(&PfqParams::new(replace(a, 0, a[0] - shift.as_bicomplex()), b.clone())?, z)?
        + pfq_value(&PfqParams::new(replace(a, 0, a[0] - shift.conj()), b.clone())?, z)?;
    let side = |count: u32| -> Result<BiComplex> {
        let mut acc = BiComplex::ZERO;
        for s in 0..=count {
            let su = s as usize;
            let sf = s as f64;
            let num: BiComplex = a[1..].iter().map(|x| bc_pochhammer(*x, su)).product();
            let den: BiComplex = b.iter().map(|x| bc_pochhammer(*x, su)).product();
            let mut shifted_a: Vec<BiComplex> = a.iter().map(|x| *x + sf).collect();
            shifted_a[0] = a[0];
            let shifted = PfqParams::new(shifted_a, b.iter().map(|x| *x + sf).collect())?;
            acc += num.checked_div(den)? * (-z).powi(s as i32) * pfq_value(&shifted, z)? * binomial(count, s);
        }
        Ok(acc)
    };
    let rhs = side(shift.m)? + side(shift.n)?;
    Ok(IdentityReport::compare(lhs, rhs, DEFAULT_TOL))
}

/// `F(beta1 - M) + F(beta1 - M-bar)` against
/// `sum_{s<=m} C(m,s) Gamma(beta1-m)/Gamma(beta1-m+s) prod(alpha)_s/prod(beta)_s Z^s F(alpha+s; beta+s)`
/// plus the same sum over `n`.
pub fn contiguous_beta_minus(params: &PfqParams, z: BiComplex, shift: Shift) -> Result<IdentityReport> {
    need(params, 0, 1)?;
    let a = params.alphas().to_vec();
    let b = params.betas();
    let lhs = pfq_value(&PfqParams::new(a.clone(), replace(b, 0, b[0] - shift.as_bicomplex()))?, z)?
        + pfq_value(&PfqParams::new(a, replace(b, 0, b[0] - shift.conj()))?, z)?;
    let side = |count: u32| -> Result<BiComplex> {
        let base = b[0] - count as f64;
        let g = bc_gamma(base)?;
        let mut acc = BiComplex::ZERO;
        for s in 0..=count {
            let sf = s as f64;
            let w = g.checked_div(bc_gamma(base + sf)?)? * pochhammer_ratio(params, s as usize)?;
            acc += w * z.powi(s as i32) * pfq_value(&params.shifted(sf, sf)?, z)? * binomial(count, s);
        }
        Ok(acc)
    };
    let rhs = side(shift.m)? + side(shift.n)?;
    Ok(IdentityReport::compare(lhs, rhs, DEFAULT_TOL))
}

/// `F(beta1 + M) + F(beta1 + M-bar)` against
/// `2F - Z sum_{s=1}^{m} prod alpha / ((beta1+s-1)_2 prod_{j>=2} beta_j) F(alpha+1; beta1+s+1, beta_{j>=2}+1)`
/// minus the same sum over `n`.
pub fn contiguous_beta_plus(params: &PfqParams, z: BiComplex, shift: Shift) -> Result<IdentityReport> {
    need(params, 0, 1)?;
    let a = params.alphas().to_vec();
    let b = params.betas();
    let lhs = pfq_value(&PfqParams::new(a.clone(), replace(b, 0, b[0] + shift.as_bicomplex()))?, z)?
        + pfq_value(&PfqParams::new(a.clone(), replace(b, 0, b[0] + shift.conj()))?, z)?;
    let prod_a: BiComplex = a.iter().copied().product();
    let prod_b_rest: BiComplex = b[1..].iter().copied().product();
    let a1: Vec<BiComplex> = a.iter().map(|x| *x + 1.0).collect();
    let side = |count: u32| -> Result<BiComplex> {
        let mut acc = BiComplex::ZERO;
        for s in 1..=count {
            let sf = s as f64;
            let mut bs: Vec<BiComplex> = b.iter().map(|x| *x + 1.0).collect();
            bs[0] = b[0] + sf + 1.0;
            let den = bc_pochhammer(b[0] + sf - 1.0, 2) * prod_b_rest;
            acc += prod_a.checked_div(den)? * pfq_value(&PfqParams::new(a1.clone(), bs)?, z)?;
        }
        Ok(acc)
    };
    let rhs = pfq_value(params, z)? * 2.0 - z * side(shift.m)? - z * side(shift.n)?;
    Ok(IdentityReport::compare(lhs, rhs, DEFAULT_TOL))
}

/// Residual of the differential operator on a truncation of the series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeResidual {
    /// `|D Y_N(Z)|` per component, `Y_N` the first `N` terms.
    pub residual: Hyperbolic,
    /// `|prod (N - 1 + alpha) c_{N-1} Z^(N-1)|`: the image of the first
    /// omitted term, which is all that survives in exact arithmetic.
    pub predicted: Hyperbolic,
}

/// Applies `d/dZ prod (theta + beta - 1) - prod (theta + alpha)` to the
/// `N`-term truncation of the series and evaluates at `Z`.
pub fn ode_residual(params: &PfqParams, z: BiComplex, n_terms: usize) -> Result<OdeResidual> {
    if n_terms == 0 {
        return Err(Error::Precondition("need at least one term".into()));
    }
    let mut res = [0.0; 2];
    let mut pred = [0.0; 2];
    for s in [1u8, 2] {
        let cp = params.component(s);
        let zs = z.component(s);
        let c = cp.coefficients(n_terms);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut zp = Complex64::new(1.0, 0.0);
        let mut last = Complex64::new(0.0, 0.0);
        for m in 0..n_terms {
            let mf = m as f64;
            let next = c.get(m + 1).copied().unwrap_or_default();
            let up: Complex64 = cp.b.iter().map(|b| b + mf).product::<Complex64>() * (mf + 1.0) * next;
            let down: Complex64 = cp.a.iter().map(|a| a + mf).product::<Complex64>() * c[m];
            acc += (up - down) * zp;
            last = down * zp;
            zp *= zs;
        }
        res[s as usize - 1] = acc.norm();
        pred[s as usize - 1] = last.norm();
    }
    Ok(OdeResidual {
        residual: Hyperbolic::from_idempotent(res[0], res[1]),
        predicted: Hyperbolic::from_idempotent(pred[0], pred[1]),
    })
}

/// Largest violation, in units of machine epsilon relative to
/// `|prod (n + alpha) c_n|`, of the coefficient recurrence
/// `(n + 1) prod (n + beta) c_{n+1} = prod (n + alpha) c_n` for `n < n_max`.
/// Coefficients are generated with double-double intermediates and rounded
/// once per step; the check is evaluated the same way. The sequence is
/// rescaled by exact powers of two to stay clear of underflow.
pub fn ode_coefficient_ulps(cp: &ComponentParams, n_max: usize) -> f64 {
    let mut c = Complex64::new(1.0, 0.0);
    let mut worst = 0.0f64;
    for n in 0..n_max {
        let nf = n as f64;
        let num = cp.a.iter().fold(CDd::from_c64(c), |acc, a| acc * CDd::shifted(*a, nf));
        let den = cp.b.iter().fold(CDd::from_c64(Complex64::new(nf + 1.0, 0.0)), |acc, b| acc * CDd::shifted(*b, nf));
        let next = num.div_to_c64(den);
        let scale = num.norm();
        if scale == 0.0 {
            break;
        }
        let lhs = den * CDd::from_c64(next);
        worst = worst.max((lhs - num).norm() / (f64::EPSILON * scale));
        c = next;
        let e = c.norm().log2();
        if e.abs() > 400.0 {
            c *= 2f64.powi(-(e as i32));
        }
    }
    worst
}

/// `Z Y'' + (beta - Z) Y' - alpha Y = 0` for `Y = 1F1(alpha; beta; Z)`.
pub fn kummer_equation(a: BiComplex, b: BiComplex, z: BiComplex) -> Result<IdentityReport> {
    let params = PfqParams::new(vec![a], vec![b])?;
    let y = pfq_value(&params, z)?;
    let y1 = derivative_series(&params, z, 1)?;
    let y2 = derivative_series(&params, z, 2)?;
    let lhs = z * y2 + (b - z) * y1;
    Ok(IdentityReport::compare(lhs, a * y, DEFAULT_TOL))
}

/// `Z (1 - Z) Y'' + (beta - (alpha1 + alpha2 + 1) Z) Y' - alpha1 alpha2 Y = 0`
/// for `Y = 2F1(alpha1, alpha2; beta; Z)`.
pub fn gauss_equation(a1: BiComplex, a2: BiComplex, b: BiComplex, z: BiComplex) -> Result<IdentityReport> {
    let params = PfqParams::new(vec![a1, a2], vec![b])?;
    let y = pfq_value(&params, z)?;
    let y1 = derivative_series(&params, z, 1)?;
    let y2 = derivative_series(&params, z, 2)?;
    let lhs = z * (BiComplex::ONE - z) * y2 + (b - (a1 + a2 + 1.0) * z) * y1;
    Ok(IdentityReport::compare(lhs, a1 * a2 * y, DEFAULT_TOL))
}
