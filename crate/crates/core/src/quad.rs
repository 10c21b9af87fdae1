//! Integral representations of bicomplex pFq checked by componentwise
//! Gaussian quadrature along real product curves: Euler-type integrals over
//! `[0, 1]`, Laplace-type integrals over `[0, inf)`, and a double integral
//! over the unit square.
//!
//! Endpoint factors `t^A (1 - t)^B` are absorbed into the weights: Gauss-Jacobi
//! and generalized Gauss-Laguerre (Golub-Welsch) for real exponents, and a
//! modified-moment product rule when an exponent is complex, since
//! `t^(i y)` oscillates without bound at the endpoint.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{bc_gamma, bc_pochhammer, complex_gamma, gamma_real};
use crate::hyper::{check_component_domain, pfq_value, sum_component, ComponentParams, PfqParams, SeriesConfig};
use crate::identities::IdentityReport;
use crate::numbers::BiComplex;

pub const MIN_NODES: usize = 16;
pub const DEFAULT_NODES: usize = 64;
pub const DEFAULT_DOUBLE_NODES: usize = 128;
pub const SINGLE_TOL: f64 = 1e-7;
pub const DOUBLE_TOL: f64 = 1e-6;
/// Relative size below which the Laguerre tail is dropped.
pub const TAIL_CUTOFF: f64 = 1e-16;
/// Residual level treated as the series floor in convergence checks.
pub const SERIES_FLOOR: f64 = 1e-12;

/// Nodes and weights of a Gaussian rule.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    fn golub_welsch(diag: &[f64], off: &[f64], mu0: f64) -> Self {
        let n = diag.len();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = off[i];
                m[(i + 1, i)] = off[i];
            }
        }
        // Weights from the Christoffel function of the orthonormal
        // polynomials; eigenvector columns are not reliably paired with
        // their eigenvalues.
        let mut nodes: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(f64::total_cmp);
        for x in nodes.iter_mut() {
            for _ in 0..2 {
                // characteristic polynomial and its derivative, rescaled
                // each step to stay in range
                let (mut q0, mut q1, mut d0, mut d1) = (0.0, 1.0, 0.0, 0.0);
                for k in 0..n {
                    let b = if k == 0 { 0.0 } else { off[k - 1] * off[k - 1] };
                    let q2 = (*x - diag[k]) * q1 - b * q0;
                    let d2 = q1 + (*x - diag[k]) * d1 - b * d0;
                    let scale = q2.abs().max(d2.abs()).max(f64::MIN_POSITIVE);
                    (q0, q1, d0, d1) = (q1 / scale, q2 / scale, d1 / scale, d2 / scale);
                }
                if d1 != 0.0 {
                    *x -= q1 / d1;
                }
            }
        }
        let weights = nodes
            .iter()
            .map(|&x| {
                let (mut prev, mut cur, mut sum) = (0.0, 1.0, 1.0);
                for k in 0..n - 1 {
                    let back = if k == 0 { 0.0 } else { off[k - 1] * prev };
                    let next = ((x - diag[k]) * cur - back) / off[k];
                    prev = cur;
                    cur = next;
                    sum += cur * cur;
                }
                mu0 / sum
            })
            .collect();
        Self { nodes, weights }
    }

    /// Gauss-Jacobi rule for weight `(1 - x)^a (1 + x)^b` on `[-1, 1]`.
    pub fn jacobi(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 || a <= -1.0 || b <= -1.0 {
            return Err(Error::InvalidParams(format!("Gauss-Jacobi needs n > 0, a, b > -1 (got {n}, {a}, {b})")));
        }
        let ab = a + b;
        let diag: Vec<f64> = (0..n)
            .map(|k| {
                if k == 0 {
                    (b - a) / (ab + 2.0)
                } else {
                    let t = 2.0 * k as f64 + ab;
                    (b * b - a * a) / (t * (t + 2.0))
                }
            })
            .collect();
        let off: Vec<f64> = (1..n)
            .map(|k| {
                let kf = k as f64;
                let t = 2.0 * kf + ab;
                let v = if k == 1 {
                    4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
                } else {
                    4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (t * t * (t + 1.0) * (t - 1.0))
                };
                v.sqrt()
            })
            .collect();
        let mu0 = 2f64.powf(ab + 1.0) * gamma_real(a + 1.0) * gamma_real(b + 1.0) / gamma_real(ab + 2.0);
        Ok(Self::golub_welsch(&diag, &off, mu0))
    }

    /// Rule on `[0, 1]` for weight `t^a (1 - t)^b`.
    pub fn unit_jacobi(n: usize, a: f64, b: f64) -> Result<Self> {
        let r = Self::jacobi(n, b, a)?;
        let scale = 2f64.powf(-a - b - 1.0);
        Ok(Self {
            nodes: r.nodes.iter().map(|x| (1.0 + x) / 2.0).collect(),
            weights: r.weights.iter().map(|w| w * scale).collect(),
        })
    }

    /// Generalized Gauss-Laguerre rule for weight `t^a e^(-t)` on `[0, inf)`.
    pub fn laguerre(n: usize, a: f64) -> Result<Self> {
        if n == 0 || a <= -1.0 {
            return Err(Error::InvalidParams(format!("Gauss-Laguerre needs n > 0, a > -1 (got {n}, {a})")));
        }
        let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + a + 1.0).collect();
        let off: Vec<f64> = (1..n).map(|k| (k as f64 * (k as f64 + a)).sqrt()).collect();
        Ok(Self::golub_welsch(&diag, &off, gamma_real(a + 1.0)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    UnitInterval,
    HalfLine,
}

/// The product curve `C(t) = C1(t1) e1 + C2(t2) e2`, both components real.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductCurve {
    pub kind: CurveKind,
    pub nodes: usize,
}

impl ProductCurve {
    pub fn new(kind: CurveKind, nodes: usize) -> Result<Self> {
        if nodes < MIN_NODES {
            return Err(Error::InvalidParams(format!("need at least {MIN_NODES} nodes, got {nodes}")));
        }
        Ok(Self { kind, nodes })
    }

    pub fn unit_interval(nodes: usize) -> Result<Self> {
        Self::new(CurveKind::UnitInterval, nodes)
    }

    pub fn half_line(nodes: usize) -> Result<Self> {
        Self::new(CurveKind::HalfLine, nodes)
    }

    fn expect(&self, kind: CurveKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InvalidParams(format!("expected a {kind:?} curve, got {:?}", self.kind)));
        }
        Ok(())
    }
}

fn component_value(cp: &ComponentParams, z: Complex64, s: u8) -> Result<Complex64> {
    check_component_domain(cp, z, s)?;
    sum_component(cp, z, &SeriesConfig::default())
        .map(|r| r.value)
        .map_err(|(terms, _)| Error::NoConvergence { terms, partial: BiComplex::ZERO })
}

/// Interpolatory product rule on `[0, 1]` for the complex weight
/// `t^A (1 - t)^B`: the integrand is interpolated at Chebyshev points and
/// integrated against exact modified moments. The moments
/// `M_k = int (1-x)^b (1+x)^a T_k(x) dx` satisfy
/// `(a + b + 2 + k) M_{k+1} = 2 (a - b) M_k + (k - a - b - 2) M_{k-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<Complex64>,
}

impl ProductRule {
    pub fn unit(n: usize, a: Complex64, b: Complex64) -> Result<Self> {
        if n < 2 || a.re <= -1.0 || b.re <= -1.0 {
            return Err(Error::InvalidParams(format!(
                "product rule needs n >= 2, Re a, Re b > -1 (got {n}, {a}, {b})"
            )));
        }
        let deg = n - 1;
        let m0 = Complex64::new(2.0, 0.0).powc(a + b + 1.0) * complex_gamma(a + 1.0)? * complex_gamma(b + 1.0)?
            / complex_gamma(a + b + 2.0)?;
        let mut moments = vec![m0, m0 * (a - b) / (a + b + 2.0)];
        for k in 1..deg {
            let kf = k as f64;
            let next = (2.0 * (a - b) * moments[k] + (kf - a - b - 2.0) * moments[k - 1]) / (a + b + 2.0 + kf);
            moments.push(next);
        }
        let scale = Complex64::new(2.0, 0.0).powc(-a - b - 1.0);
        let df = deg as f64;
        let half = |j: usize| if j == 0 || j == deg { 0.5 } else { 1.0 };
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for j in 0..=deg {
            let theta = std::f64::consts::PI * j as f64 / df;
            let w: Complex64 = (0..=deg).map(|k| moments[k] * (half(k) * (k as f64 * theta).cos())).sum();
            nodes.push((1.0 + theta.cos()) / 2.0);
            weights.push(w * scale * (2.0 / df * half(j)));
        }
        Ok(Self { nodes, weights })
    }
}

/// A rule on `[0, 1]` for `t^A (1 - t)^B`, built once and reused.
#[derive(Clone, Debug, PartialEq)]
pub enum UnitRule {
    Gauss(GaussRule),
    Product(ProductRule),
}

impl UnitRule {
    /// Gauss-Jacobi for real exponents, the [`ProductRule`] otherwise.
    pub fn new(n: usize, a: Complex64, b: Complex64) -> Result<Self> {
        if a.im == 0.0 && b.im == 0.0 {
            Ok(Self::Gauss(GaussRule::unit_jacobi(n, a.re, b.re)?))
        } else {
            Ok(Self::Product(ProductRule::unit(n, a, b)?))
        }
    }

    pub fn integrate(&self, g: impl Fn(f64) -> Result<Complex64>) -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        match self {
            Self::Gauss(r) => {
                for (t, w) in r.nodes.iter().zip(&r.weights) {
                    sum += g(*t)? * *w;
                }
            }
            Self::Product(r) => {
                for (t, w) in r.nodes.iter().zip(&r.weights) {
                    sum += g(*t)? * *w;
                }
            }
        }
        Ok(sum)
    }
}

/// `int_0^1 t^A (1 - t)^B g(t) dt` with `Re A, Re B > -1`.
pub fn unit_integral(n: usize, a: Complex64, b: Complex64, g: impl Fn(f64) -> Result<Complex64>) -> Result<Complex64> {
    UnitRule::new(n, a, b)?.integrate(g)
}

fn laguerre_sum(rule: &GaussRule, g: impl Fn(f64) -> Result<Complex64>) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut small = 0;
    for (t, w) in rule.nodes.iter().zip(&rule.weights) {
        let term = g(*t)? * *w;
        sum += term;
        if term.norm() < TAIL_CUTOFF * sum.norm() {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    Ok(sum)
}

/// `int_0^inf t^A e^(-t) g(t) dt` with `Re A > -1`; the Laguerre tail is
/// dropped once weighted terms fall below [`TAIL_CUTOFF`] of the running
/// sum. A complex exponent is split at `t = 1`: a product rule on `[0, 1]`
/// and plain Gauss-Laguerre on the shifted remainder.
pub fn half_line_integral(n: usize, a: Complex64, g: impl Fn(f64) -> Result<Complex64>) -> Result<Complex64> {
    if a.im == 0.0 {
        return laguerre_sum(&GaussRule::laguerre(n, a.re)?, g);
    }
    let zero = Complex64::new(0.0, 0.0);
    let head = unit_integral(n, a, zero, |t| Ok(g(t)? * (-t).exp()))?;
    let tail = laguerre_sum(&GaussRule::laguerre(n, 0.0)?, |s| {
        Ok(g(1.0 + s)? * Complex64::new(1.0 + s, 0.0).powc(a) * (-1f64).exp())
    })?;
    Ok(head + tail)
}

fn positive_parts(label: &str, w: BiComplex) -> Result<()> {
    for s in [1u8, 2] {
        if w.component(s).re <= 0.0 {
            return Err(Error::Precondition(format!(
                "{label} needs positive real part in component {s}, got {}",
                w.component(s)
            )));
        }
    }
    Ok(())
}

fn tail_params(params: &PfqParams) -> Result<PfqParams> {
    PfqParams::new(params.alphas()[1..].to_vec(), params.betas()[1..].to_vec())
}

/// `pFq(Z) = Gamma(b1) / (Gamma(a1) Gamma(b1 - a1)) int_0^1 t^(a1-1) (1-t)^(b1-a1-1) p-1Fq-1(Zt) dt`.
pub fn euler_integral(params: &PfqParams, z: BiComplex, curve: ProductCurve) -> Result<IdentityReport> {
    curve.expect(CurveKind::UnitInterval)?;
    if params.p() == 0 || params.q() == 0 {
        return Err(Error::Precondition("needs p >= 1 and q >= 1".into()));
    }
    if params.p() > params.q() + 1 {
        return Err(Error::Domain(format!("{}F{} has no integral representation off Z = 0", params.p(), params.q())));
    }
    let (a1, b1) = (params.alphas()[0], params.betas()[0]);
    positive_parts("alpha_1", a1)?;
    positive_parts("beta_1 - alpha_1", b1 - a1)?;
    let inner = tail_params(params)?;
    let rhs = pfq_value(params, z)?;
    let integral = z.try_map(|s, zs| {
        let cp = inner.component(s);
        let (a, b) = (a1.component(s), b1.component(s));
        unit_integral(curve.nodes, a - 1.0, b - a - 1.0, |t| component_value(&cp, zs * t, s))
    })?;
    let pre = bc_gamma(b1)?.checked_div(bc_gamma(a1)? * bc_gamma(b1 - a1)?)?;
    Ok(IdentityReport::compare(pre * integral, rhs, SINGLE_TOL))
}

/// `p+1Fq(v, alpha; beta; Z) = (1 / Gamma(v)) int_0^inf e^(-t) t^(v-1) pFq(Zt) dt`.
pub fn laplace_integral(v: BiComplex, params: &PfqParams, z: BiComplex, curve: ProductCurve) -> Result<IdentityReport> {
    curve.expect(CurveKind::HalfLine)?;
    if params.p() > params.q() {
        return Err(Error::Precondition(format!("inner function must have p <= q, got {}F{}", params.p(), params.q())));
    }
    positive_parts("v", v)?;
    let mut alphas = vec![v];
    alphas.extend_from_slice(params.alphas());
    let rhs = pfq_value(&PfqParams::new(alphas, params.betas().to_vec())?, z)?;
    let lhs = z.try_map(|s, zs| {
        let cp = params.component(s);
        let vs = v.component(s);
        let i = half_line_integral(curve.nodes, vs - 1.0, |t| component_value(&cp, zs * t, s))?;
        Ok(i / complex_gamma(vs)?)
    })?;
    Ok(IdentityReport::compare(lhs, rhs, SINGLE_TOL))
}

/// `int int u^(m-1) v^(n-1) (1-u)^n pFq((1-u)(1-v) Z) du dv` over the unit
/// square against `Gamma(m) Gamma(n) / Gamma(m+n+1) p+1Fq+1(alpha, 1; beta, m+n+1; Z)`.
pub fn double_integral(
    m: BiComplex,
    n: BiComplex,
    params: &PfqParams,
    z: BiComplex,
    nodes: usize,
) -> Result<IdentityReport> {
    if nodes < MIN_NODES {
        return Err(Error::InvalidParams(format!("need at least {MIN_NODES} nodes, got {nodes}")));
    }
    positive_parts("m", m)?;
    positive_parts("n", n)?;
    let mut alphas = params.alphas().to_vec();
    alphas.push(BiComplex::ONE);
    let mut betas = params.betas().to_vec();
    betas.push(m + n + 1.0);
    let big = PfqParams::new(alphas, betas)?;
    let pre = (bc_gamma(m)? * bc_gamma(n)?).checked_div(bc_gamma(m + n + 1.0)?)?;
    let rhs = pre * pfq_value(&big, z)?;
    let lhs = z.try_map(|s, zs| {
        let cp = params.component(s);
        let (ms, ns) = (m.component(s), n.component(s));
        let inner = UnitRule::new(nodes, ns - 1.0, Complex64::new(0.0, 0.0))?;
        UnitRule::new(nodes, ms - 1.0, ns)?
            .integrate(|u| inner.integrate(|v| component_value(&cp, zs * ((1.0 - u) * (1.0 - v)), s)))
    })?;
    Ok(IdentityReport::compare(lhs, rhs, DOUBLE_TOL))
}

/// The Beta-product identity behind the double integral:
/// `int u^(m-1) (1-u)^(n+k) du * int v^(n-1) (1-v)^k dv = Gamma(m) Gamma(n) k! / (Gamma(m+n+1) (m+n+1)_k)`.
pub fn beta_product(m: BiComplex, n: BiComplex, k: usize, nodes: usize) -> Result<IdentityReport> {
    positive_parts("m", m)?;
    positive_parts("n", n)?;
    let kf = k as i32;
    let lhs = m.try_map(|s, ms| {
        let ns = n.component(s);
        let zero = Complex64::new(0.0, 0.0);
        let u = unit_integral(nodes, ms - 1.0, ns, |u| Ok(Complex64::new((1.0 - u).powi(kf), 0.0)))?;
        let v = unit_integral(nodes, ns - 1.0, zero, |v| Ok(Complex64::new((1.0 - v).powi(kf), 0.0)))?;
        Ok(u * v)
    })?;
    let fact: f64 = (1..=k).map(|j| j as f64).product();
    let num = bc_gamma(m)? * bc_gamma(n)? * fact;
    let rhs = num.checked_div(bc_gamma(m + n + 1.0)? * bc_pochhammer(m + n + 1.0, k))?;
    Ok(IdentityReport::compare(lhs, rhs, SINGLE_TOL))
}

/// Residuals of one check at a sequence of node counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeConvergence {
    pub nodes: Vec<usize>,
    pub residuals: Vec<f64>,
    /// Each doubling cut the residual by at least 4x or reached the floor.
    pub converging: bool,
}

pub fn node_convergence(counts: &[usize], check: impl Fn(usize) -> Result<IdentityReport>) -> Result<NodeConvergence> {
    let residuals = counts.iter().map(|&n| check(n).map(|r| r.max_residual())).collect::<Result<Vec<_>>>()?;
    let converging = residuals.windows(2).all(|w| w[0] <= SERIES_FLOOR || w[1] <= (w[0] / 4.0).max(SERIES_FLOOR));
    Ok(NodeConvergence { nodes: counts.to_vec(), residuals, converging })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn idem(a: Complex64, b: Complex64) -> BiComplex {
        BiComplex::from_idempotent(a, b)
    }

    fn bc(x: f64) -> BiComplex {
        BiComplex::from_real(x)
    }

    fn unit(n: usize) -> ProductCurve {
        ProductCurve::unit_interval(n).unwrap()
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let r = GaussRule::jacobi(8, 0.0, 0.0).unwrap();
        let integral = |k: i32| r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(k)).sum::<f64>();
        for k in 0..16 {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((integral(k) - exact).abs() < 1e-14, "x^{k}");
        }
    }

    #[test]
    fn jacobi_moments_are_beta_values() {
        let (a, b) = (-0.4, 1.7);
        let r = GaussRule::unit_jacobi(20, a, b).unwrap();
        for k in 0..10 {
            let got: f64 = r.nodes.iter().zip(&r.weights).map(|(t, w)| w * t.powi(k)).sum();
            let kf = k as f64;
            let exact = gamma_real(a + kf + 1.0) * gamma_real(b + 1.0) / gamma_real(a + b + kf + 2.0);
            assert!((got - exact).abs() < 1e-13 * exact, "k = {k}: {got} vs {exact}");
        }
        let half = GaussRule::jacobi(17, -0.5, -0.5).unwrap();
        assert!((half.weights.iter().sum::<f64>() - std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn laguerre_moments_are_gamma_values() {
        let a = 0.3;
        let r = GaussRule::laguerre(24, a).unwrap();
        for k in 0..12 {
            let got: f64 = r.nodes.iter().zip(&r.weights).map(|(t, w)| w * t.powi(k)).sum();
            let exact = gamma_real(a + k as f64 + 1.0);
            assert!((got - exact).abs() < 1e-12 * exact, "k = {k}");
        }
    }

    #[test]
    fn rules_reject_bad_input() {
        assert!(GaussRule::jacobi(4, -1.0, 0.0).is_err());
        assert!(GaussRule::laguerre(0, 0.0).is_err());
        assert!(ProductCurve::unit_interval(15).is_err());
    }

    #[test]
    fn complex_exponents() {
        // int_0^1 t^(i) dt = 1/(1 + i)
        let v = unit_integral(32, c(0.0, 1.0), c(0.0, 0.0), |_| Ok(c(1.0, 0.0))).unwrap();
        assert!((v - 1.0 / c(1.0, 1.0)).norm() < 1e-13);
        // int_0^inf t^(0.5 + 2i) e^-t dt = Gamma(1.5 + 2i)
        let v = half_line_integral(64, c(0.5, 2.0), |_| Ok(c(1.0, 0.0))).unwrap();
        assert!((v - complex_gamma(c(1.5, 2.0)).unwrap()).norm() < 1e-9);
    }

    #[test]
    fn product_rule_against_reference() {
        // frozen from the series sum 0.6^n B(A + n + 1, B + 1) at 30 digits
        let want = c(1.026_506_386_863_07, 1.297_512_742_055_718);
        for n in [64, 128] {
            let v = unit_integral(n, c(-0.9, 0.8), c(-0.7, -0.5), |t| Ok(c(1.0 / (1.0 - 0.6 * t), 0.0))).unwrap();
            assert!((v - want).norm() < 1e-12, "n = {n}: {v}");
        }
        // Gamma(A + 1) / 0.6^(A + 1)
        let want = c(0.394_189_016_326_852_8, 0.438_904_582_150_529_1);
        let v = half_line_integral(64, c(0.2, 1.5), |t| Ok(c((0.4 * t).exp(), 0.0))).unwrap();
        assert!((v - want).norm() < 1e-10, "{v}");
        // real exponents: agrees with Gauss-Jacobi
        let g = |t: f64| Ok(c((2.0 * t).sin(), t.cos()));
        let r = ProductRule::unit(64, c(-0.4, 0.0), c(0.8, 0.0)).unwrap();
        let pr: Complex64 = r.nodes.iter().zip(&r.weights).map(|(t, w)| g(*t).unwrap() * w).sum();
        let gj = unit_integral(32, c(-0.4, 0.0), c(0.8, 0.0), g).unwrap();
        assert!((pr - gj).norm() < 1e-14, "{}", (pr - gj).norm());
    }

    #[test]
    fn confluent_worked_example() {
        // 1F1(1; 3; Z) = 2 int (1 - t) e^(Zt) dt
        let z = idem(c(0.3, 0.0), c(0.6, 0.0));
        let p = PfqParams::new(vec![bc(1.0)], vec![bc(3.0)]).unwrap();
        let r = euler_integral(&p, z, unit(DEFAULT_NODES)).unwrap();
        assert!(r.max_residual() < 1e-8, "{r:?}");
        let direct =
            z.try_map(|_, zs| unit_integral(64, c(0.0, 0.0), c(1.0, 0.0), |t| Ok((zs * t).exp() * 2.0))).unwrap();
        assert!((direct - r.rhs).norm_euclid() < 1e-13);
    }

    #[test]
    fn gauss_case() {
        let p = PfqParams::new(vec![bc(0.8), bc(1.1)], vec![bc(2.3)]).unwrap();
        let z = BiComplex::from_parts(0.2, 0.0, 0.1, 0.0);
        let r = euler_integral(&p, z, unit(DEFAULT_NODES)).unwrap();
        assert!(r.max_residual() < 1e-8, "{r:?}");
    }

    #[test]
    fn complex_embedding_has_no_i2_part() {
        let p = PfqParams::new(
            vec![BiComplex::from_complex(c(0.7, 0.2)), bc(1.3)],
            vec![BiComplex::from_complex(c(2.1, -0.4))],
        )
        .unwrap();
        let z = BiComplex::from_complex(c(0.3, 0.4));
        let r = euler_integral(&p, z, unit(DEFAULT_NODES)).unwrap();
        assert!(r.passed);
        assert!(r.lhs.re2().norm() < 1e-12);
    }

    #[test]
    fn euler_preconditions() {
        let p = PfqParams::new(vec![bc(2.0)], vec![bc(1.5)]).unwrap();
        assert!(matches!(euler_integral(&p, bc(0.1), unit(32)), Err(Error::Precondition(_))));
        let p = PfqParams::new(vec![bc(0.5)], vec![bc(1.5)]).unwrap();
        let half = ProductCurve::half_line(32).unwrap();
        assert!(matches!(euler_integral(&p, bc(0.1), half), Err(Error::InvalidParams(_))));
        let p = PfqParams::new(vec![bc(0.5), bc(1.0)], vec![bc(1.5)]).unwrap();
        assert!(matches!(euler_integral(&p, bc(1.2), unit(32)), Err(Error::Domain(_))));
    }

    #[test]
    fn laplace_examples() {
        let half = ProductCurve::half_line(DEFAULT_NODES).unwrap();
        // 1F0(3; Z) = (1 - Z)^-3
        let z = idem(c(0.2, 0.0), c(0.5, 0.0));
        let empty = PfqParams::new(vec![], vec![]).unwrap();
        let r = laplace_integral(bc(3.0), &empty, z, half).unwrap();
        assert!(r.max_residual() < 1e-8, "{r:?}");
        assert!((r.rhs - (BiComplex::ONE - z).powi(-3)).norm_euclid() < 1e-13);
        let r = laplace_integral(bc(1.0), &empty, z, half).unwrap();
        assert!(r.max_residual() < 1e-8);
        let v = idem(c(2.5, 0.0), c(1.5, 0.0));
        let p = PfqParams::new(vec![idem(c(0.7, 0.1), c(1.2, 0.0))], vec![idem(c(1.9, 0.0), c(2.4, -0.2))]).unwrap();
        let z = BiComplex::from_parts(0.3, 0.0, 0.05, 0.0);
        assert!(laplace_integral(v, &p, z, half).unwrap().max_residual() < 1e-7);
        assert!(matches!(laplace_integral(bc(-1.0), &p, z, half), Err(Error::Precondition(_))));
    }

    #[test]
    fn double_integral_examples() {
        // alpha1 = beta1 collapses the inner 1F1 to exp
        let p = PfqParams::new(vec![bc(1.7)], vec![bc(1.7)]).unwrap();
        let z = idem(c(0.25, 0.0), c(0.4, 0.0));
        let r = double_integral(bc(1.5), bc(1.5), &p, z, 64).unwrap();
        assert!(r.max_residual() < 1e-7, "{r:?}");
        let r = double_integral(bc(1.5), bc(1.5), &p, BiComplex::ZERO, 32).unwrap();
        let beta = gamma_real(1.5).powi(2) / gamma_real(4.0);
        assert!((r.lhs - bc(beta)).norm_euclid() < 1e-13 && r.passed);
        let g = PfqParams::new(vec![bc(0.6), bc(1.3)], vec![bc(2.2)]).unwrap();
        let m = BiComplex::from_parts(1.2, 0.0, 0.1, 0.0);
        let z = BiComplex::from_parts(0.1, 0.0, 0.05, 0.0);
        assert!(double_integral(m, bc(2.0), &g, z, DEFAULT_DOUBLE_NODES).unwrap().max_residual() < 1e-6);
    }

    #[test]
    fn beta_product_identity() {
        let m = idem(c(0.6, 0.3), c(1.4, -0.2));
        let n = idem(c(2.1, 0.0), c(0.8, 0.5));
        for k in 0..=10 {
            let r = beta_product(m, n, k, 32).unwrap();
            assert!(r.max_residual() < 1e-12, "k = {k}: {r:?}");
        }
    }

    #[test]
    fn residual_shrinks_with_nodes() {
        let p = PfqParams::new(vec![idem(c(0.3, 0.2), c(0.6, 0.0)), bc(1.1)], vec![idem(c(0.9, 0.0), c(1.2, 0.4))])
            .unwrap();
        let z = idem(c(0.6, 0.1), c(-0.5, 0.2));
        let conv = node_convergence(&[16, 32, 64, 128], |n| euler_integral(&p, z, unit(n))).unwrap();
        assert!(conv.converging, "{conv:?}");
        assert!(conv.residuals[0] > conv.residuals[3]);
    }
}
