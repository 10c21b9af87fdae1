//! Coherent-type states whose normalization is a bicomplex pFq, over a
//! truncated Fock basis:
//!
//! ```text
//! |p;q;Z> = N(|Z|_h^2)^(-1/2) sum_n Z^n / sqrt(rho(n)) |n>,
//! rho(n) = n! prod (beta)_n / prod (alpha)_n,   rho(n+1) = rho(n) f(n)^2,
//! f(n)^2 = (n + 1) prod (beta + n) / prod (alpha + n).
//! ```
//!
//! Each idempotent component is an independent classical tower; Fock indices
//! are diagonal, `n (e1 + e2)`. Since `rho` outgrows the double range within
//! a few hundred levels it is kept as [`ExtFloat`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Dd, ExtFloat};
use crate::gamma::near_nonpositive_integer;
use crate::hyper::{pfq_value, PfqParams};
use crate::identities::IdentityReport;
use crate::numbers::{BiComplex, Hyperbolic};

pub const DEFAULT_TRUNCATION: usize = 256;
pub const MAX_TRUNCATION: usize = 1 << 14;
/// Stop growing the basis once `|c_N|^2` is below this.
pub const TAIL_COEFF: f64 = 1e-16;
/// Largest acceptable `1 - sum |c_n|^2`.
pub const TAIL_NORM: f64 = 1e-12;
/// Imaginary part of a ladder ratio, relative to its real part, still read as real.
pub const REAL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherentSpec {
    pub params: PfqParams,
    pub z: BiComplex,
    pub truncation: usize,
}

impl CoherentSpec {
    pub fn new(params: PfqParams, z: BiComplex, truncation: usize) -> Result<Self> {
        if truncation < 2 {
            return Err(Error::InvalidParams(format!("truncation must be at least 2, got {truncation}")));
        }
        for a in params.alphas() {
            for s in [1u8, 2] {
                let w = a.component(s);
                if near_nonpositive_integer(w).is_some() {
                    return Err(Error::InvalidParams(format!("alpha component {s} is a nonpositive integer ({w})")));
                }
            }
        }
        Ok(Self { params, z, truncation })
    }
}

/// `f(m)^2 = (m + 1) prod (beta + m) / prod (alpha + m)` for one component.
pub fn ladder_ratio(params: &PfqParams, s: u8, m: usize) -> Complex64 {
    let cp = params.component(s);
    let mf = m as f64;
    let num: Complex64 = cp.b.iter().map(|b| b + mf).product();
    let den: Complex64 = cp.a.iter().map(|a| a + mf).product();
    num * (mf + 1.0) / den
}

fn positive_ratio(params: &PfqParams, s: u8, m: usize) -> Result<f64> {
    let r = ladder_ratio(params, s, m);
    if r.is_finite() && r.re > 0.0 && r.im.abs() <= REAL_TOL * r.re {
        Ok(r.re)
    } else {
        Err(Error::Positivity { component: s, index: m })
    }
}

/// Rejects parameters for which some `f(m)^2`, `m < n_max`, is not a
/// strictly positive real in either component. The case `m = 0` is the
/// condition `prod beta / prod alpha > 0`.
pub fn positivity_gate(params: &PfqParams, n_max: usize) -> Result<()> {
    for m in 0..n_max {
        for s in [1u8, 2] {
            positive_ratio(params, s, m)?;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderTables {
    /// `rho(0..=N)` per component.
    pub rho: Vec<[ExtFloat; 2]>,
    /// `f(0..N)`.
    pub f: Vec<Hyperbolic>,
}

impl LadderTables {
    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// `rho(n)` as a bicomplex number, infinite past the double range.
    pub fn rho_bicomplex(&self, n: usize) -> BiComplex {
        let [r1, r2] = self.rho[n];
        Hyperbolic::from_idempotent(r1.to_f64(), r2.to_f64()).to_bicomplex()
    }
}

/// Builds `rho(0..=N)` and `f(0..N)` for `N = n_max`.
pub fn build_tables_to(params: &PfqParams, n_max: usize) -> Result<LadderTables> {
    let mut rho = vec![[ExtFloat::ONE; 2]];
    let mut f = Vec::with_capacity(n_max);
    for m in 0..n_max {
        let r = [positive_ratio(params, 1, m)?, positive_ratio(params, 2, m)?];
        let last = rho[m];
        rho.push([last[0].mul_f64(r[0]), last[1].mul_f64(r[1])]);
        f.push(Hyperbolic::from_idempotent(r[0].sqrt(), r[1].sqrt()));
    }
    Ok(LadderTables { rho, f })
}

pub fn build_tables(spec: &CoherentSpec) -> Result<LadderTables> {
    build_tables_to(&spec.params, spec.truncation)
}

/// `rho(n) = n! prod (beta)_n / prod (alpha)_n` evaluated directly.
pub fn rho_direct(params: &PfqParams, s: u8, n: usize) -> ExtFloat {
    let cp = params.component(s);
    let mut acc = ExtFloat::ONE;
    for k in 0..n {
        let kf = k as f64;
        for b in &cp.b {
            acc = acc.mul_f64((b + kf).re);
        }
        acc = acc.mul_f64(kf + 1.0);
    }
    for k in 0..n {
        let kf = k as f64;
        for a in &cp.a {
            acc = acc / ExtFloat::from_f64((a + kf).re);
        }
    }
    acc
}

fn ulps(got: f64, want: f64) -> f64 {
    if got == want {
        return 0.0;
    }
    (got - want).abs() / (f64::EPSILON * want.abs())
}

/// Worst violation of `rho(n+1) = rho(n) f(n)^2` in ulps, with the
/// right side formed in double-double from the stored `f`.
pub fn rho_recurrence_ulps(t: &LadderTables) -> f64 {
    let mut worst = 0.0f64;
    for n in 0..t.len() {
        for s in 0..2 {
            let (lo, hi) = (t.rho[n][s], t.rho[n + 1][s]);
            let fs = Dd::new(t.f[n].component(s as u8 + 1));
            let prod = (Dd::new(lo.m) * fs * fs).to_f64();
            worst = worst.max(ulps(prod, hi.mantissa_at(lo.e)));
        }
    }
    worst
}

/// `N(|Z|_h^2)`: pFq at the real idempotent argument `|z1|^2 e1 + |z2|^2 e2`.
pub fn normalization(spec: &CoherentSpec) -> Result<BiComplex> {
    let zeta = BiComplex::from_idempotent(
        Complex64::new(spec.z.idem1().norm_sqr(), 0.0),
        Complex64::new(spec.z.idem2().norm_sqr(), 0.0),
    );
    pfq_value(&spec.params, zeta)
}

/// Normalized state over the levels `0..N` actually used.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentState {
    pub spec: CoherentSpec,
    pub tables: LadderTables,
    pub norm: BiComplex,
    /// `c_n` for `n < N`.
    pub coeffs: Vec<BiComplex>,
    /// `c_N`, the first omitted coefficient.
    pub next: BiComplex,
    /// `1 - sum |c_n|^2` per component.
    pub tail: Hyperbolic,
}

impl CoherentState {
    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }
}

fn coefficients_at(spec: &CoherentSpec, norm: BiComplex, tables: &LadderTables) -> (Vec<BiComplex>, BiComplex) {
    let n_max = tables.len();
    let mut c = norm.map(|w| Complex64::new(1.0 / w.re.sqrt(), 0.0));
    let mut out = Vec::with_capacity(n_max);
    for n in 0..n_max {
        out.push(c);
        let f = tables.f[n];
        c = BiComplex::from_idempotent(c.idem1() * spec.z.idem1() / f.h1, c.idem2() * spec.z.idem2() / f.h2);
    }
    (out, c)
}

fn tail_of(coeffs: &[BiComplex]) -> Hyperbolic {
    let s1: f64 = coeffs.iter().map(|c| c.idem1().norm_sqr()).sum();
    let s2: f64 = coeffs.iter().map(|c| c.idem2().norm_sqr()).sum();
    Hyperbolic::from_idempotent(1.0 - s1, 1.0 - s2)
}

/// `c_n = Z^n / sqrt(rho(n) N)` for `n < N`, generated by
/// `c_{n+1} = c_n Z / f(n)`. The basis doubles from the requested truncation
/// until `|c_N|^2 < 1e-16` and the norm defect is below `1e-12`.
pub fn state_coefficients(spec: &CoherentSpec) -> Result<CoherentState> {
    let norm = normalization(spec)?;
    let mut n_max = spec.truncation;
    loop {
        let tables = build_tables_to(&spec.params, n_max)?;
        let (coeffs, next) = coefficients_at(spec, norm, &tables);
        let tail = tail_of(&coeffs);
        let small = next.idem1().norm_sqr() < TAIL_COEFF && next.idem2().norm_sqr() < TAIL_COEFF;
        if small && tail.max_component() < TAIL_NORM {
            let spec = CoherentSpec { truncation: n_max, ..spec.clone() };
            return Ok(CoherentState { spec, tables, norm, coeffs, next, tail });
        }
        if n_max >= MAX_TRUNCATION {
            return Err(Error::Truncation(n_max));
        }
        n_max = (2 * n_max).min(MAX_TRUNCATION);
    }
}

/// `c_n` from the closed form, for cross-checks.
pub fn coefficient_direct(state: &CoherentState, n: usize) -> BiComplex {
    let z = state.spec.z;
    let part = |s: u8| {
        let zs = z.component(s);
        let rho = state.tables.rho[n][s as usize - 1];
        let scale = rho.mul_f64(state.norm.component(s).re).sqrt();
        zs.powu(n as u32) / scale.to_f64()
    };
    BiComplex::from_idempotent(part(1), part(2))
}

fn require_same(a: &CoherentSpec, b: &CoherentSpec) -> Result<()> {
    if a.params != b.params {
        return Err(Error::ParamMismatch);
    }
    Ok(())
}

/// `<a|b>` as `sum_n conj(c_n) c'_n` per component.
pub fn inner_product(a: &CoherentSpec, b: &CoherentSpec) -> Result<BiComplex> {
    require_same(a, b)?;
    let sa = state_coefficients(a)?;
    let sb = state_coefficients(b)?;
    let mut acc = [Complex64::new(0.0, 0.0); 2];
    for (x, y) in sa.coeffs.iter().zip(&sb.coeffs) {
        acc[0] += x.idem1().conj() * y.idem1();
        acc[1] += x.idem2().conj() * y.idem2();
    }
    Ok(BiComplex::from_idempotent(acc[0], acc[1]))
}

/// `<a|b> = N(conj(z_s) z'_s) / sqrt(N(|z_s|^2) N(|z'_s|^2))` per component.
pub fn inner_product_closed(a: &CoherentSpec, b: &CoherentSpec) -> Result<BiComplex> {
    require_same(a, b)?;
    let cross = BiComplex::from_idempotent(a.z.idem1().conj() * b.z.idem1(), a.z.idem2().conj() * b.z.idem2());
    let num = pfq_value(&a.params, cross)?;
    let den = (normalization(a)? * normalization(b)?).sqrt();
    num.checked_div(den)
}

fn h_norm(v: impl Iterator<Item = BiComplex>) -> Hyperbolic {
    let (mut s1, mut s2) = (0.0, 0.0);
    for x in v {
        s1 += x.idem1().norm_sqr();
        s2 += x.idem2().norm_sqr();
    }
    Hyperbolic::from_idempotent(s1.sqrt(), s2.sqrt())
}

/// Eigenstate check `A- psi = Z psi` on the truncated state. The bound is
/// `|c_N| f(N-1)`, the only defect in exact arithmetic, plus `16 eps |Z psi|`.
pub fn annihilate(spec: &CoherentSpec) -> Result<IdentityReport> {
    let st = state_coefficients(spec)?;
    annihilate_state(&st)
}

pub fn annihilate_state(st: &CoherentState) -> Result<IdentityReport> {
    let n = st.truncation();
    let z = st.spec.z;
    let lowered: Vec<BiComplex> = (0..n)
        .map(|k| if k + 1 < n { st.coeffs[k + 1] * st.tables.f[k].to_bicomplex() } else { BiComplex::ZERO })
        .collect();
    let scaled: Vec<BiComplex> = st.coeffs.iter().map(|c| z * *c).collect();
    let residual = h_norm(lowered.iter().zip(&scaled).map(|(a, b)| *a - *b));
    let zpsi = h_norm(scaled.iter().copied());
    let edge = st.tables.f[n - 1];
    let bound = Hyperbolic::from_idempotent(
        st.next.idem1().norm() * edge.h1 + 16.0 * f64::EPSILON * zpsi.h1,
        st.next.idem2().norm() * edge.h2 + 16.0 * f64::EPSILON * zpsi.h2,
    );
    let lhs = h_norm(lowered.into_iter()).to_bicomplex();
    Ok(IdentityReport::with_bound(lhs, zpsi.to_bicomplex(), residual, bound))
}

/// Truncated matrices of the ladder operators per component:
/// `A-` from `f`, `A+` from `sqrt(rho(n+1) / rho(n))`.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderMatrices {
    pub lower: [DMatrix<f64>; 2],
    pub raise: [DMatrix<f64>; 2],
}

pub fn ladder_matrices(t: &LadderTables, size: usize) -> Result<LadderMatrices> {
    if size == 0 || size > t.len() {
        return Err(Error::Index(size));
    }
    let build = |s: usize, raise: bool| {
        let mut m = DMatrix::<f64>::zeros(size, size);
        for n in 0..size - 1 {
            if raise {
                m[(n + 1, n)] = t.rho[n + 1][s].ratio(t.rho[n][s]).sqrt();
            } else {
                m[(n, n + 1)] = t.f[n].component(s as u8 + 1);
            }
        }
        m
    };
    Ok(LadderMatrices { lower: [build(0, false), build(1, false)], raise: [build(0, true), build(1, true)] })
}

/// Largest entrywise gap, in ulps, between `A+` and the conjugate transpose
/// of `A-` under the componentwise inner product.
pub fn adjointness_ulps(m: &LadderMatrices) -> f64 {
    let mut worst = 0.0f64;
    for s in 0..2 {
        let adj = m.lower[s].transpose();
        for (a, b) in m.raise[s].iter().zip(adj.iter()) {
            if *a != 0.0 || *b != 0.0 {
                worst = worst.max(ulps(*a, *b));
            }
        }
    }
    worst
}

/// `<n|[A-, A+]|n> = f(n)^2 - f(n-1)^2`.
pub fn commutator_diagonal(t: &LadderTables, n: usize) -> Result<BiComplex> {
    if n == 0 || n >= t.len() {
        return Err(Error::Index(n));
    }
    let (a, b) = (t.f[n], t.f[n - 1]);
    Ok(Hyperbolic::from_idempotent(a.h1 * a.h1 - b.h1 * b.h1, a.h2 * a.h2 - b.h2 * b.h2).to_bicomplex())
}

/// `rho(n+1)/rho(n) - rho(n)/rho(n-1)`.
pub fn commutator_from_rho(t: &LadderTables, n: usize) -> Result<BiComplex> {
    if n == 0 || n >= t.len() {
        return Err(Error::Index(n));
    }
    let d = |s: usize| t.rho[n + 1][s].ratio(t.rho[n][s]) - t.rho[n][s].ratio(t.rho[n - 1][s]);
    Ok(Hyperbolic::from_idempotent(d(0), d(1)).to_bicomplex())
}

/// The commutator diagonal of the dense truncated matrices; rows near the
/// truncation edge are excluded since `A+` loses its last column there.
pub fn commutator_matrix(m: &LadderMatrices) -> Vec<BiComplex> {
    let diag = |s: usize| {
        let c = &m.lower[s] * &m.raise[s] - &m.raise[s] * &m.lower[s];
        (0..c.nrows() - 1).map(|i| c[(i, i)]).collect::<Vec<_>>()
    };
    let (d1, d2) = (diag(0), diag(1));
    d1.iter().zip(&d2).map(|(a, b)| Hyperbolic::from_idempotent(*a, *b).to_bicomplex()).collect()
}

/// Gap in ulps of the operand scale `max(f(n)^2, f(n-1)^2)` between two
/// evaluations of the commutator diagonal.
pub fn commutator_ulps(t: &LadderTables, n: usize, other: BiComplex) -> Result<f64> {
    let d = commutator_diagonal(t, n)?;
    let mut worst = 0.0f64;
    for s in [1u8, 2] {
        let scale = t.f[n].component(s).powi(2).max(t.f[n - 1].component(s).powi(2));
        let gap = (d.component(s) - other.component(s)).norm();
        worst = worst.max(gap / (f64::EPSILON * scale));
    }
    Ok(worst)
}

/// One row of the per-level table emitted by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub n: usize,
    pub rho1: String,
    pub rho2: String,
    pub f1: f64,
    pub f2: f64,
    pub prob1: f64,
    pub prob2: f64,
}

pub fn level_rows(st: &CoherentState) -> Vec<LevelRow> {
    (0..st.truncation())
        .map(|n| LevelRow {
            n,
            rho1: st.tables.rho[n][0].to_string(),
            rho2: st.tables.rho[n][1].to_string(),
            f1: st.tables.f[n].h1,
            f2: st.tables.f[n].h2,
            prob1: st.coeffs[n].idem1().norm_sqr(),
            prob2: st.coeffs[n].idem2().norm_sqr(),
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

    fn bc(x: f64) -> BiComplex {
        BiComplex::from_real(x)
    }

    fn idem(a: Complex64, b: Complex64) -> BiComplex {
        BiComplex::from_idempotent(a, b)
    }

    fn glauber(z: BiComplex, n: usize) -> CoherentSpec {
        CoherentSpec::new(PfqParams::new(vec![], vec![]).unwrap(), z, n).unwrap()
    }

    #[test]
    fn rho_examples() {
        let t = build_tables(&glauber(bc(0.5), 30)).unwrap();
        assert_eq!(t.rho[0], [ExtFloat::ONE; 2]);
        let mut fact = 1.0;
        for n in 0..20 {
            assert_eq!(t.rho[n][0].to_f64(), fact);
            fact *= (n + 1) as f64;
        }
        let p = PfqParams::new(vec![bc(2.0)], vec![bc(3.0)]).unwrap();
        let t = build_tables_to(&p, 4).unwrap();
        assert!((t.rho[2][0].to_f64() - 4.0).abs() < 1e-15);
        assert!((t.rho_bicomplex(2) - bc(4.0)).norm_euclid() < 1e-15);
    }

    #[test]
    fn rho_recurrence_and_direct_form() {
        let p = PfqParams::new(vec![idem(c(0.7, 0.0), c(1.9, 0.0))], vec![idem(c(2.5, 0.0), c(0.4, 0.0)), bc(1.3)])
            .unwrap();
        let t = build_tables_to(&p, 300).unwrap();
        assert!(t.rho[300][0].to_f64().is_infinite());
        assert!(rho_recurrence_ulps(&t) <= 2.0);
        for n in [1, 17, 150, 300] {
            for s in [1u8, 2] {
                let r = t.rho[n][s as usize - 1].ratio(rho_direct(&p, s, n));
                assert!((r - 1.0).abs() < 1e-12, "n = {n}");
            }
        }
    }

    #[test]
    fn positivity_gate_cases() {
        let bad = PfqParams::new(vec![bc(-0.5)], vec![bc(1.0)]).unwrap();
        assert!(matches!(positivity_gate(&bad, 10), Err(Error::Positivity { component: 1, index: 0 })));
        // passes at m = 0 but turns negative at m = 1
        let later = PfqParams::new(vec![bc(-0.5)], vec![bc(-1.5)]).unwrap();
        assert!(matches!(positivity_gate(&later, 10), Err(Error::Positivity { index: 1, .. })));
        let complex = PfqParams::new(vec![BiComplex::from_complex(c(1.0, 0.5))], vec![bc(2.0)]).unwrap();
        assert!(positivity_gate(&complex, 4).is_err());
        let ok = PfqParams::new(vec![idem(c(0.5, 0.0), c(2.0, 0.0))], vec![bc(1.5)]).unwrap();
        assert!(positivity_gate(&ok, 500).is_ok());
        assert!(CoherentSpec::new(PfqParams::new(vec![bc(-2.0)], vec![]).unwrap(), bc(0.1), 10).is_err());
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalization(&glauber(BiComplex::ZERO, 10)).unwrap(), BiComplex::ONE);
        let n = normalization(&glauber(idem(c(0.5, 0.0), c(0.3, 0.0)), 10)).unwrap();
        assert!((n.idem1().re - 0.25f64.exp()).abs() < 1e-15);
        assert!((n.idem2().re - 0.09f64.exp()).abs() < 1e-15);
        // 2F1 with eta = 4.5 at |Z| = 1 is still finite
        let p = PfqParams::new(vec![bc(0.5), bc(1.0)], vec![bc(6.0)]).unwrap();
        let s = CoherentSpec::new(p, BiComplex::from_complex(Complex64::from_polar(1.0, 0.7)), 10).unwrap();
        assert!(normalization(&s).unwrap().is_finite());
    }

    #[test]
    fn glauber_state() {
        let st = state_coefficients(&glauber(bc(0.5), 64)).unwrap();
        let mut fact = 1.0f64;
        for n in 0..20 {
            if n > 0 {
                fact *= n as f64;
            }
            let want = (-0.125f64).exp() * 0.5f64.powi(n as i32) / fact.sqrt();
            assert!((st.coeffs[n].idem1().re - want).abs() < 1e-15 * want.max(1e-300) + 1e-300, "n = {n}");
        }
        assert!(st.tail.max_component().abs() < 1e-12);
        let zero = state_coefficients(&glauber(BiComplex::ZERO, 8)).unwrap();
        assert_eq!(zero.coeffs[0], BiComplex::ONE);
        assert!(zero.coeffs[1..].iter().all(|c| *c == BiComplex::ZERO));
    }

    #[test]
    fn truncation_grows_until_tail_is_small() {
        let p = PfqParams::new(vec![bc(1.5)], vec![]).unwrap();
        let st = state_coefficients(&CoherentSpec::new(p, bc(0.95), 32).unwrap()).unwrap();
        assert!(st.truncation() > 256);
        assert!(st.next.idem1().norm_sqr() < TAIL_COEFF);
        let n = st.truncation();
        for k in [0, 5, n / 2, n - 1] {
            let d = coefficient_direct(&st, k);
            assert!((d - st.coeffs[k]).norm_euclid() <= 1e-12 * d.norm_euclid(), "k = {k}");
        }
    }

    #[test]
    fn inner_products() {
        let a = glauber(bc(0.5), 64);
        let b = glauber(bc(0.2), 64);
        let v = inner_product(&a, &b).unwrap();
        let want = 0.1f64.exp() / (0.25f64.exp() * 0.04f64.exp()).sqrt();
        assert!((v - bc(want)).norm_euclid() < 1e-14);
        assert!((inner_product_closed(&a, &b).unwrap() - v).norm_euclid() < 1e-14);
        let p = PfqParams::new(vec![idem(c(0.8, 0.0), c(1.6, 0.0))], vec![bc(2.2)]).unwrap();
        let s = CoherentSpec::new(p.clone(), idem(c(0.4, 0.3), c(-0.6, 0.1)), 64).unwrap();
        let t = CoherentSpec::new(p, idem(c(0.1, -0.5), c(0.2, 0.2)), 64).unwrap();
        assert!((inner_product(&s, &s).unwrap() - BiComplex::ONE).norm_euclid() < 1e-12);
        let closed = inner_product_closed(&s, &t).unwrap();
        assert!((inner_product(&s, &t).unwrap() - closed).norm_euclid() < 1e-12);
        let zero = CoherentSpec { z: BiComplex::ZERO, ..s.clone() };
        let c0 = state_coefficients(&s).unwrap().coeffs[0];
        assert!((inner_product(&s, &zero).unwrap() - c0).norm_euclid() < 1e-15);
        assert_eq!(inner_product(&s, &glauber(bc(0.1), 8)), Err(Error::ParamMismatch));
    }

    #[test]
    fn eigenstate_examples() {
        let r = annihilate(&glauber(bc(0.5), 200)).unwrap();
        assert!(r.passed && r.max_residual() < 1e-12, "{r:?}");
        let r = annihilate(&glauber(BiComplex::ZERO, 16)).unwrap();
        assert_eq!(r.max_residual(), 0.0);
        let p = PfqParams::new(vec![bc(1.3)], vec![bc(0.7)]).unwrap();
        let r = annihilate(&CoherentSpec::new(p, idem(c(0.4, 0.0), c(0.2, 0.0)), 256).unwrap()).unwrap();
        assert!(r.passed && r.max_residual() < 1e-11, "{r:?}");
    }

    #[test]
    fn ladder_algebra() {
        let p = PfqParams::new(vec![idem(c(0.6, 0.0), c(1.1, 0.0))], vec![bc(2.0), idem(c(0.3, 0.0), c(4.5, 0.0))])
            .unwrap();
        let t = build_tables_to(&p, 40).unwrap();
        let m = ladder_matrices(&t, 30).unwrap();
        assert!(adjointness_ulps(&m) <= 2.0);
        let dense = commutator_matrix(&m);
        for (n, d) in dense.iter().enumerate().take(29).skip(1) {
            assert!(commutator_ulps(&t, n, *d).unwrap() <= 2.0, "n = {n}");
            let rho = commutator_from_rho(&t, n).unwrap();
            assert!(commutator_ulps(&t, n, rho).unwrap() <= 8.0, "n = {n}");
        }
        assert_eq!(commutator_diagonal(&t, 0), Err(Error::Index(0)));
        assert!(ladder_matrices(&t, 41).is_err());
    }

    #[test]
    fn commutator_examples() {
        let t = build_tables(&glauber(bc(0.3), 20)).unwrap();
        for n in 1..20 {
            assert!((commutator_diagonal(&t, n).unwrap() - BiComplex::ONE).norm_euclid() < 1e-13);
        }
        // p = 0, q = 1, beta = 2: f(n)^2 = (n + 1)(n + 2), difference 2n + 2
        let p = PfqParams::new(vec![], vec![bc(2.0)]).unwrap();
        let t = build_tables_to(&p, 20).unwrap();
        for n in 1..20 {
            let d = commutator_diagonal(&t, n).unwrap();
            assert!((d - bc(2.0 * n as f64 + 2.0)).norm_euclid() < 1e-12);
            assert!((commutator_from_rho(&t, n).unwrap() - d).norm_euclid() < 1e-10);
        }
    }

    fn signed() -> impl Strategy<Value = f64> {
        prop_oneof![-3.0..-0.05f64, 0.05..3.0f64].prop_filter("off the poles", |x| (x - x.round()).abs() > 1e-3)
    }

    proptest! {
        #[test]
        fn gate_matches_ratio_signs(a in prop::collection::vec(signed(), 0..3), b in prop::collection::vec(signed(), 0..3)) {
            let p = PfqParams::new(a.iter().map(|x| bc(*x)).collect(), b.iter().map(|x| bc(*x)).collect()).unwrap();
            let n = 50;
            let all_positive = (0..n).all(|m| {
                let num: f64 = b.iter().map(|x| x + m as f64).product();
                let den: f64 = a.iter().map(|x| x + m as f64).product();
                num / den > 0.0
            });
            prop_assert_eq!(positivity_gate(&p, n).is_ok(), all_positive);
            let first: f64 = b.iter().product::<f64>() / a.iter().product::<f64>();
            if first <= 0.0 {
                prop_assert!(positivity_gate(&p, n).is_err());
            }
        }
    }
}
