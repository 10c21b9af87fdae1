//! Seeded verification suites, one per identity family, shared by the CLI
//! `verify` command and the acceptance tests. Each case draws its own
//! generator from `(seed, suite id, case index)` and produces one row with
//! per-component residuals.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::coherent::{
    adjointness_ulps, annihilate_state, build_tables, commutator_from_rho, commutator_matrix, commutator_ulps,
    ladder_matrices, rho_direct, rho_recurrence_ulps, state_coefficients, CoherentSpec, DEFAULT_TRUNCATION,
};
use crate::error::{Error, Result};
use crate::hyper::{cauchy_test, classify, oracle_pfq_complex, pfq_value, ConvergenceKind, PfqParams, SeriesConfig};
use crate::identities::{
    contiguous_alpha_minus, contiguous_alpha_plus, contiguous_beta_minus, contiguous_beta_plus, cr_residuals,
    derivative_relation, ode_coefficient_ulps, quad_even, quad_odd, saalschutz, CrVariable, IdentityReport, Shift,
};
use crate::numbers::{BiComplex, Hyperbolic};
use crate::quad::{
    double_integral, euler_integral, laplace_integral, node_convergence, ProductCurve, DEFAULT_DOUBLE_NODES,
    DEFAULT_NODES,
};
use crate::sampling::{
    admissible_shape, annulus, bicomplex, case_rng, case_seed, complex_in, disc, off_poles, param, params, real_param,
    region_z, retry, uniform, CaseRng, POLE_GAP,
};

/// Suite ids with one-line titles, in the order `all` runs them.
pub const SUITES: &[(&str, &str)] = &[
    ("thm2.1", "split pFq against classical complex evaluation per component"),
    ("thm2.2", "convergence classes and boundary behaviour"),
    ("examples", "closed forms of 1F1(1;3;Z), 2F1(1,2;1;Z) and 1F0(3;Z)"),
    ("thm3.1", "Euler-type integral over [0,1]"),
    ("thm3.5", "Laplace-type integral over [0,inf)"),
    ("thm3.8", "double integral over the unit square"),
    ("thm4.1", "even quadratic transform"),
    ("thm4.2", "odd quadratic transform"),
    ("thm4.3", "terminating balanced 3F2 at unit argument"),
    ("thm5.1", "k-th derivative relation"),
    ("thm5.2", "Cauchy-Riemann residuals shrink as h^2"),
    ("thm6.1", "contiguous relation for alpha1 + M"),
    ("thm6.2", "contiguous relation for alpha1 - M"),
    ("thm6.3", "contiguous relation for beta1 - M"),
    ("thm6.4", "contiguous relation for beta1 + M"),
    ("thm7.1", "coefficient recurrence of the differential equation"),
    ("cs-rho", "rho recurrence against f and the direct product"),
    ("cs-eigen", "coherent states are eigenvectors of the lowering operator"),
    ("cs-adjoint", "raising matrix is the adjoint of the lowering matrix"),
    ("cs-commutator", "commutator diagonal against the f^2 difference"),
    ("cs-positivity", "positivity gate rejects sign-violating parameters"),
];

/// Largest gap, in ulps of the operand scale, allowed between the
/// commutator diagonal from `f` and the one from ratios of `rho`.
pub const RHO_FORM_ULPS: f64 = 16.0;
/// Step sizes of the Cauchy-Riemann slope check.
pub const CR_STEPS: [f64; 3] = [1e-3, 1e-4, 1e-5];
/// Node counts of the quadrature convergence check.
pub const NODE_LADDER: [usize; 4] = [16, 32, 64, 128];
pub const BOUNDARY_WINDOW: usize = 100;
pub const BOUNDARY_THRESHOLD: f64 = 1e-8;
pub const BOUNDARY_BUDGET: usize = 50_000_000;
pub const DIVERGENT_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// `|lhs - rhs| / max(1, |lhs|, |rhs|)` per component.
    Residual,
    /// Relative gap in units of machine epsilon.
    Ulps,
    /// Distance of a log-log slope from its target.
    Slope,
    /// Pass/fail outcome of a discrete check.
    Flag,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseRow {
    pub theorem: String,
    pub case: usize,
    pub seed: u64,
    pub params: String,
    pub z: String,
    pub residual1: f64,
    pub residual2: f64,
    pub passed: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub id: String,
    pub title: String,
    pub metric: Metric,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: usize,
    pub failed: usize,
    pub max_residual: f64,
    pub rows: Vec<CaseRow>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Overrides the suite's default case count.
    pub samples: Option<usize>,
    /// Overrides the tolerance of [`Metric::Residual`] suites.
    pub tol: Option<f64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: 7, samples: None, tol: None }
    }
}

/// Outcome of one case before it becomes a row.
struct Case {
    params: String,
    z: String,
    r: [f64; 2],
    verdict: Option<bool>,
    note: String,
}

impl Case {
    fn new(params: String, z: String, r: [f64; 2]) -> Self {
        Self { params, z, r, verdict: None, note: String::new() }
    }

    fn of(p: &PfqParams, z: BiComplex, r: Hyperbolic) -> Self {
        Self::new(fmt_params(p), z.idempotent_string(), [r.h1, r.h2])
    }

    fn verdict(mut self, ok: bool) -> Self {
        self.verdict = Some(ok);
        self
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

pub fn fmt_params(p: &PfqParams) -> String {
    let list = |v: &[BiComplex]| v.iter().map(|x| x.idempotent_string()).collect::<Vec<_>>().join(", ");
    format!("a=[{}]; b=[{}]", list(p.alphas()), list(p.betas()))
}

fn title(id: &str) -> &'static str {
    SUITES.iter().find(|(i, _)| *i == id).map(|(_, t)| *t).unwrap_or("")
}

fn run_cases(
    id: &str,
    metric: Metric,
    default_samples: usize,
    default_tol: f64,
    opts: &SuiteOptions,
    mut f: impl FnMut(&mut CaseRng, usize, f64) -> Result<Case>,
) -> SuiteReport {
    let samples = opts.samples.unwrap_or(default_samples);
    let tolerance = match (metric, opts.tol) {
        (Metric::Residual, Some(t)) => t,
        _ => default_tol,
    };
    let rows: Vec<CaseRow> = (0..samples)
        .map(|case| {
            let seed = case_seed(opts.seed, id, case);
            let mut rng = case_rng(seed);
            let row = |c: Case, passed: bool| CaseRow {
                theorem: id.to_string(),
                case,
                seed,
                params: c.params,
                z: c.z,
                residual1: c.r[0],
                residual2: c.r[1],
                passed,
                note: c.note,
            };
            match f(&mut rng, case, tolerance) {
                Ok(c) => {
                    let within = c.r.iter().all(|r| r.is_finite() && *r <= tolerance);
                    let passed = c.verdict.unwrap_or(within);
                    row(c, passed)
                }
                Err(e) => row(Case::new(String::new(), String::new(), [f64::NAN; 2]).note(e.to_string()), false),
            }
        })
        .collect();
    let passed = rows.iter().filter(|r| r.passed).count();
    let max_residual =
        rows.iter().flat_map(|r| [r.residual1, r.residual2]).filter(|r| r.is_finite()).fold(0.0, f64::max);
    SuiteReport {
        id: id.to_string(),
        title: title(id).to_string(),
        metric,
        tolerance,
        samples,
        passed,
        failed: samples - passed,
        max_residual,
        rows,
    }
}

fn report_case(p: &PfqParams, z: BiComplex, r: IdentityReport) -> Case {
    Case::of(p, z, r.residual)
}

fn no_sample() -> Error {
    Error::Precondition("no admissible sample within the attempt limit".into())
}

pub fn suite_ids() -> impl Iterator<Item = &'static str> {
    SUITES.iter().map(|(id, _)| *id)
}

/// Runs one suite, or every suite for `"all"`.
pub fn run(id: &str, opts: &SuiteOptions) -> Result<Vec<SuiteReport>> {
    if id == "all" {
        return Ok(suite_ids().map(|i| run_one(i, opts).expect("listed suite")).collect());
    }
    run_one(id, opts).map(|r| vec![r])
}

fn run_one(id: &str, o: &SuiteOptions) -> Result<SuiteReport> {
    Ok(match id {
        "thm2.1" => oracle_suite(o),
        "thm2.2" => trichotomy_suite(o),
        "examples" => examples_suite(o),
        "thm3.1" => euler_suite(o),
        "thm3.5" => laplace_suite(o),
        "thm3.8" => double_suite(o),
        "thm4.1" => quad_suite("thm4.1", o, true),
        "thm4.2" => quad_suite("thm4.2", o, false),
        "thm4.3" => saalschutz_suite(o),
        "thm5.1" => derivative_suite(o),
        "thm5.2" => cr_suite(o),
        "thm6.1" => contiguous_suite("thm6.1", o),
        "thm6.2" => contiguous_suite("thm6.2", o),
        "thm6.3" => contiguous_suite("thm6.3", o),
        "thm6.4" => contiguous_suite("thm6.4", o),
        "thm7.1" => ode_suite(o),
        "cs-rho" => cs_rho_suite(o),
        "cs-eigen" => cs_eigen_suite(o),
        "cs-adjoint" => cs_adjoint_suite(o),
        "cs-commutator" => cs_commutator_suite(o),
        "cs-positivity" => cs_positivity_suite(o),
        other => return Err(Error::InvalidParams(format!("unknown suite id {other:?}"))),
    })
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / b.norm()
    }
}

fn oracle_suite(o: &SuiteOptions) -> SuiteReport {
    run_cases("thm2.1", Metric::Residual, 1000, 1e-12, o, |rng, _, _| {
        let (p, q) = admissible_shape(rng, 3);
        let pr = params(rng, p, q);
        let z = region_z(rng, p, q, 2.0, 0.9);
        let v = pfq_value(&pr, z)?;
        let cfg = SeriesConfig::default();
        let mut r = [0.0; 2];
        for s in [1u8, 2] {
            let cp = pr.component(s);
            let oracle = oracle_pfq_complex(&cp.a, &cp.b, z.component(s), &cfg)
                .ok_or(Error::NoConvergence { terms: cfg.max_terms, partial: BiComplex::ZERO })?;
            r[s as usize - 1] = rel(v.component(s), oracle);
        }
        Ok(Case::new(fmt_params(&pr), z.idempotent_string(), r).note(format!("{p}F{q}")))
    })
}

fn expected_kind(p: usize, q: usize, margin: f64) -> ConvergenceKind {
    if p <= q {
        ConvergenceKind::Entire
    } else if p == q + 1 {
        if margin > crate::hyper::BOUNDARY_MARGIN {
            ConvergenceKind::UnitBallBoundaryConvergent
        } else {
            ConvergenceKind::UnitBall
        }
    } else {
        ConvergenceKind::DivergentEverywhere
    }
}

/// `p = q + 1` parameters with `eta_s` set to draws from `eta`.
fn boundary_params(rng: &mut CaseRng, eta: (f64, f64)) -> Option<PfqParams> {
    let q = rng.gen_range_usize(0, 2);
    let p = q + 1;
    let a: Vec<BiComplex> = (0..p).map(|_| param(rng)).collect();
    let mut b: Vec<BiComplex> = (0..q).map(|_| param(rng)).collect();
    let target = bicomplex(rng, |r| Complex64::new(uniform(r, eta.0, eta.1), 0.0));
    let sum_a: BiComplex = a.iter().copied().sum();
    let sum_b: BiComplex = b.iter().copied().sum();
    let shift = BiComplex::from_idempotent(
        Complex64::new(target.idem1().re - (sum_b - sum_a).idem1().re, 0.0),
        Complex64::new(target.idem2().re - (sum_b - sum_a).idem2().re, 0.0),
    );
    if q == 0 {
        // no beta to move: shift alpha_1 instead
        let mut a = a;
        a[0] -= shift;
        if !a.iter().all(|x| off_poles(*x, POLE_GAP)) {
            return None;
        }
        return PfqParams::new(a, b).ok();
    }
    b[0] += shift;
    if !off_poles(b[0], POLE_GAP) {
        return None;
    }
    PfqParams::new(a, b).ok()
}

trait UsizeRange {
    fn gen_range_usize(&mut self, lo: usize, hi: usize) -> usize;
}

impl UsizeRange for CaseRng {
    fn gen_range_usize(&mut self, lo: usize, hi: usize) -> usize {
        use rand::Rng;
        self.gen_range(lo..=hi)
    }
}

fn trichotomy_suite(o: &SuiteOptions) -> SuiteReport {
    let shapes = o.samples.unwrap_or(200);
    let boundary = (shapes / 4).max(1);
    let total = shapes + 2 * boundary;
    let opts = SuiteOptions { samples: Some(total), ..*o };
    run_cases("thm2.2", Metric::Flag, total, 0.0, &opts, |rng, case, _| {
        if case < shapes {
            let p = rng.gen_range_usize(0, 5);
            let q = rng.gen_range_usize(0, 5);
            let pr = params(rng, p, q);
            let got = classify(&pr).kind;
            let want = expected_kind(p, q, pr.margin());
            let ok = got == want;
            let flag = if ok { 0.0 } else { 1.0 };
            return Ok(Case::new(fmt_params(&pr), String::new(), [flag; 2])
                .verdict(ok)
                .note(format!("{p}F{q}: {got}")));
        }
        let convergent = case < shapes + boundary;
        let eta = if convergent { (0.1 + 1e-6, 2.1) } else { (-2.1, -0.1 - 1e-6) };
        let pr = retry(rng, |r| boundary_params(r, eta)).ok_or_else(no_sample)?;
        let z = if convergent {
            bicomplex(rng, |r| Complex64::from_polar(1.0, uniform(r, PI / 2.0, 1.5 * PI)))
        } else {
            BiComplex::ONE
        };
        let budget = if convergent { BOUNDARY_BUDGET } else { DIVERGENT_BUDGET };
        let mut spreads = [0.0; 2];
        let mut ok = true;
        let mut notes = Vec::new();
        for s in [1u8, 2] {
            let out = cauchy_test(&pr.component(s), z.component(s), BOUNDARY_WINDOW, BOUNDARY_THRESHOLD, budget);
            let good = if convergent { out.converged } else { !out.converged && out.scaled_last_term > 1e-3 };
            // convergent rows report the window spread, divergent rows a 0/1 flag
            spreads[s as usize - 1] = if convergent { out.window_spread } else { f64::from(u8::from(!good)) };
            ok &= good;
            notes.push(format!(
                "c{s}: {} terms, spread {:.3e}, n|t_n| {:.3e}",
                out.terms, out.window_spread, out.scaled_last_term
            ));
        }
        let kind = if convergent { "boundary-convergent" } else { "boundary-divergent" };
        Ok(Case::new(fmt_params(&pr), z.idempotent_string(), spreads).verdict(ok).note(format!(
            "{kind} margin {:.4}; {}",
            pr.margin(),
            notes.join("; ")
        )))
    })
}

fn examples_suite(o: &SuiteOptions) -> SuiteReport {
    run_cases("examples", Metric::Residual, 100, 1e-11, o, |rng, _, _| {
        let z = bicomplex(rng, |r| annulus(r, 0.05, 0.9));
        let one = BiComplex::ONE;
        let bc = BiComplex::from_real;
        let confluent = PfqParams::new(vec![one], vec![bc(3.0)])?;
        let gauss = PfqParams::new(vec![one, bc(2.0)], vec![one])?;
        let binomial = PfqParams::new(vec![bc(3.0)], vec![])?;
        let pairs = [
            (pfq_value(&confluent, z)?, (z.exp() - one - z).checked_div(z * z)? * 2.0),
            (pfq_value(&gauss, z)?, (one - z).powi(-2)),
            (pfq_value(&binomial, z)?, (one - z).powi(-3)),
        ];
        let mut r = Hyperbolic::ZERO;
        for (lhs, rhs) in pairs {
            let rep = IdentityReport::compare(lhs, rhs, 0.0);
            r = Hyperbolic::from_idempotent(r.h1.max(rep.residual.h1), r.h2.max(rep.residual.h2));
        }
        Ok(Case::new(String::new(), z.idempotent_string(), [r.h1, r.h2]))
    })
}

fn ladder_note(res: &[f64]) -> String {
    let parts: Vec<String> = NODE_LADDER.iter().zip(res).map(|(n, r)| format!("{n}:{r:.1e}")).collect();
    format!("nodes {}", parts.join(" "))
}

fn quad_case(
    p: &PfqParams,
    z: BiComplex,
    nodes: usize,
    check: impl Fn(usize) -> Result<IdentityReport>,
) -> Result<Case> {
    // the ladder shares its largest rule with the main check
    let cache = std::cell::RefCell::new(Vec::<(usize, IdentityReport)>::new());
    let cached = |n: usize| -> Result<IdentityReport> {
        if let Some((_, r)) = cache.borrow().iter().find(|(k, _)| *k == n) {
            return Ok(*r);
        }
        let r = check(n)?;
        cache.borrow_mut().push((n, r));
        Ok(r)
    };
    let main = cached(nodes)?;
    let conv = node_convergence(&NODE_LADDER, cached)?;
    let ok = main.residual.h1 <= main.tolerance.h1 && main.residual.h2 <= main.tolerance.h2 && conv.converging;
    Ok(report_case(p, z, main).verdict(ok).note(ladder_note(&conv.residuals)))
}

fn euler_suite(o: &SuiteOptions) -> SuiteReport {
    run_cases("thm3.1", Metric::Residual, 100, 1e-7, o, |rng, _, tol| {
        let (p, q) = loop {
            let (p, q) = admissible_shape(rng, 3);
            if p >= 1 && q >= 1 {
                break (p, q);
            }
        };
        let a1 = bicomplex(rng, |r| complex_in(r, (0.2, 2.0), (-0.5, 0.5)));
        let gap = bicomplex(rng, |r| complex_in(r, (0.2, 2.0), (-0.5, 0.5)));
        let mut a = vec![a1];
        a.extend((1..p).map(|_| param(rng)));
        let mut b = vec![a1 + gap];
        b.extend((1..q).map(|_| param(rng)));
        let pr = PfqParams::new(a, b)?;
        let z = bicomplex(rng, |r| disc(r, 0.8));
        let check = |n| euler_integral(&pr, z, ProductCurve::unit_interval(n)?).map(|r| retol(r, tol));
        quad_case(&pr, z, DEFAULT_NODES, check)
    })
}

fn retol(r: IdentityReport, tol: f64) -> IdentityReport {
    IdentityReport::with_bound(r.lhs, r.rhs, r.residual, Hyperbolic::splat(tol))
}

fn laplace_suite(o: &SuiteOptions) -> SuiteReport {
    run_cases("thm3.5", Metric::Residual, 100, 1e-7, o, |rng, _, tol| {
        let p = rng.gen_range_usize(0, 2);
        let q = rng.gen_range_usize(p, 2);
        let pr = params(rng, p, q);
        let v = bicomplex(rng, |r| complex_in(r, (0.5, 3.0), (-0.5, 0.5)));
        let z = bicomplex(rng, |r| disc(r, 0.8));
        let check = |n| laplace_integral(v, &pr, z, ProductCurve::half_line(n)?).map(|r| retol(r, tol));
        let c = quad_case(&pr, z, DEFAULT_NODES, check)?;
        let note = format!("v={}; {}", v.idempotent_string(), c.note);
        Ok(c.note(note))
    })
}

fn double_suite(o: &SuiteOptions) -> SuiteReport {
    run_cases("thm3.8", Metric::Residual, 100, 1e-6, o, |rng, _, tol| {
        let (p, q) = admissible_shape(rng, 2);
        let pr = params(rng, p, q);
        let m = bicomplex(rng, |r| complex_in(r, (0.5, 2.5), (-0.3, 0.3)));
        let n = bicomplex(rng, |r| complex_in(r, (0.5, 2.5), (-0.3, 0.3)));
        let z = bicomplex(rng, |r| disc(r, 0.8));
        let check = |k| double_integral(m, n, &pr, z, k).map(|r| retol(r, tol));
        let c = quad_case(&pr, z, DEFAULT_DOUBLE_NODES, check)?;
        let note = format!("m={}; n={}; {}", m.idempotent_string(), n.idempotent_string(), c.note);
        Ok(c.note(note))
    })
}

fn quad_suite(id: &'static str, o: &SuiteOptions, even: bool) -> SuiteReport {
    run_cases(id, Metric::Residual, 500, 1e-9, o, |rng, _, _| {
        let (p, q) = admissible_shape(rng, 2);
        let pr = params(rng, p, q);
        let z = region_z(rng, p, q, 2.0, 0.8);
        let r = if even { quad_even(&pr, z)? } else { quad_odd(&pr, z)? };
        Ok(report_case(&pr, z, r))
    })
}

fn saalschutz_suite(o: &SuiteOptions) -> SuiteReport {
    run_cases("thm4.3", Metric::Residual, 500, 1e-9, o, |rng, _, _| {
        let n = rng.gen_range_usize(0, 10);
        let (a1, a2, b) = retry(rng, |r| {
            let (a1, a2, b) = (param(r), param(r), param(r));
            let b2 = BiComplex::ONE - b + a1 + a2 - n as f64;
            (off_poles(b, POLE_GAP) && off_poles(b2, POLE_GAP)).then_some((a1, a2, b))
        })
        .ok_or_else(no_sample)?;
        let r = saalschutz(n, a1, a2, b)?;
        let pr = PfqParams::new(
            vec![BiComplex::from_real(-(n as f64)), a1, a2],
            vec![b, BiComplex::ONE - b + a1 + a2 - n as f64],
        )?;
        Ok(report_case(&pr, BiComplex::ONE, r).note(format!("n={n}")))
    })
}

fn derivative_suite(o: &SuiteOptions) -> SuiteReport {
    run_cases("thm5.1", Metric::Residual, 500, 1e-9, o, |rng, _, _| {
        let (p, q) = admissible_shape(rng, 2);
        let pr = params(rng, p, q);
        let k = rng.gen_range_usize(1, 3);
        let z = region_z(rng, p, q, 2.0, 0.8);
        Ok(report_case(&pr, z, derivative_relation(&pr, z, k)?).note(format!("k={k}")))
    })
}

/// Log-log slopes of the residual between consecutive steps of [`CR_STEPS`].
pub fn cr_slopes(p: &PfqParams, z: BiComplex, var: CrVariable) -> Result<[f64; 2]> {
    let mags =
        CR_STEPS.iter().map(|h| cr_residuals(p, z, var, *h).map(|r| r.magnitude())).collect::<Result<Vec<_>>>()?;
    Ok([(mags[0] / mags[1]).log10(), (mags[1] / mags[2]).log10()])
}

fn cr_suite(o: &SuiteOptions) -> SuiteReport {
    run_cases("thm5.2", Metric::Slope, 20, 0.2, o, |rng, case, _| {
        let (pr, z, var, label) = if case % 2 == 0 {
            let a = bicomplex(rng, |r| complex_in(r, (20.0, 60.0), (-1.0, 1.0)));
            let b = bicomplex(rng, |r| complex_in(r, (0.5, 2.0), (-0.3, 0.3)));
            let z = bicomplex(rng, |r| Complex64::from_polar(uniform(r, 0.3, 1.0), uniform(r, -PI / 3.0, PI / 3.0)));
            (PfqParams::new(vec![a], vec![b])?, z, CrVariable::Argument, "argument")
        } else {
            let a = bicomplex(rng, |r| complex_in(r, (0.05, 0.2), (-0.05, 0.05)));
            let b = bicomplex(rng, |r| complex_in(r, (0.5, 2.0), (-0.3, 0.3)));
            let z = real_param(rng, 12.0, 18.0);
            (PfqParams::new(vec![a], vec![b])?, z, CrVariable::Alpha(0), "alpha1")
        };
        let slopes = cr_slopes(&pr, z, var)?;
        Ok(Case::of(&pr, z, Hyperbolic::from_idempotent((slopes[0] - 2.0).abs(), (slopes[1] - 2.0).abs()))
            .note(format!("{label}: slopes {:.4} {:.4}", slopes[0], slopes[1])))
    })
}

fn contiguous_suite(id: &'static str, o: &SuiteOptions) -> SuiteReport {
    run_cases(id, Metric::Residual, 500, 1e-9, o, |rng, _, _| {
        let shift = Shift::new(rng.gen_range_usize(0, 3) as u32, rng.gen_range_usize(0, 3) as u32);
        let (pr, z) = retry(rng, |r| {
            let (p, q) = admissible_shape(r, 2);
            if p == 0 || q == 0 {
                return None;
            }
            let pr = params(r, p, q);
            if id == "thm6.3" {
                let b1 = pr.betas()[0];
                if !(0..=3).all(|k| off_poles(b1 - k as f64, POLE_GAP)) {
                    return None;
                }
            }
            let z = region_z(r, p, q, 1.5, 0.7);
            Some((pr, z))
        })
        .ok_or_else(no_sample)?;
        let r = match id {
            "thm6.1" => contiguous_alpha_plus(&pr, z, shift)?,
            "thm6.2" => contiguous_alpha_minus(&pr, z, shift)?,
            "thm6.3" => contiguous_beta_minus(&pr, z, shift)?,
            _ => contiguous_beta_plus(&pr, z, shift)?,
        };
        Ok(report_case(&pr, z, r).note(format!("M={}e1+{}e2", shift.m, shift.n)))
    })
}

fn ode_suite(o: &SuiteOptions) -> SuiteReport {
    run_cases("thm7.1", Metric::Ulps, 100, 2.0, o, |rng, _, _| {
        let p = rng.gen_range_usize(0, 3);
        let q = rng.gen_range_usize(0, 3);
        let pr = params(rng, p, q);
        let r = [ode_coefficient_ulps(&pr.component(1), 200), ode_coefficient_ulps(&pr.component(2), 200)];
        Ok(Case::new(fmt_params(&pr), String::new(), r).note(format!("{p}F{q}, n <= 200")))
    })
}

fn coherent_spec(rng: &mut CaseRng) -> Result<CoherentSpec> {
    let (p, q) = admissible_shape(rng, 2);
    let a = (0..p).map(|_| real_param(rng, 0.2, 3.0)).collect();
    let b = (0..q).map(|_| real_param(rng, 0.2, 3.0)).collect();
    let z = region_z(rng, p, q, 2.0, 0.8);
    CoherentSpec::new(PfqParams::new(a, b)?, z, DEFAULT_TRUNCATION)
}

fn cs_rho_suite(o: &SuiteOptions) -> SuiteReport {
    run_cases("cs-rho", Metric::Ulps, 100, 2.0, o, |rng, _, tol| {
        let spec = coherent_spec(rng)?;
        let t = build_tables(&spec)?;
        let ulps = rho_recurrence_ulps(&t);
        let mut direct = 0.0f64;
        for n in 0..=t.len() {
            for s in [1u8, 2] {
                direct = direct.max((t.rho[n][s as usize - 1].ratio(rho_direct(&spec.params, s, n)) - 1.0).abs());
            }
        }
        Ok(Case::new(fmt_params(&spec.params), spec.z.idempotent_string(), [ulps, ulps])
            .verdict(ulps <= tol && direct < 1e-12)
            .note(format!("direct product agrees to {direct:.2e}")))
    })
}

fn cs_eigen_suite(o: &SuiteOptions) -> SuiteReport {
    run_cases("cs-eigen", Metric::Flag, 100, 0.0, o, |rng, _, _| {
        let spec = coherent_spec(rng)?;
        let st = state_coefficients(&spec)?;
        let r = annihilate_state(&st)?;
        Ok(Case::of(&spec.params, spec.z, r.residual)
            .verdict(r.passed && st.truncation() >= DEFAULT_TRUNCATION)
            .note(format!("N={}; bound {:.2e}/{:.2e}", st.truncation(), r.tolerance.h1, r.tolerance.h2)))
    })
}

fn cs_adjoint_suite(o: &SuiteOptions) -> SuiteReport {
    run_cases("cs-adjoint", Metric::Ulps, 100, 2.0, o, |rng, _, _| {
        let spec = coherent_spec(rng)?;
        let t = build_tables(&spec)?;
        let u = adjointness_ulps(&ladder_matrices(&t, 64)?);
        Ok(Case::new(fmt_params(&spec.params), spec.z.idempotent_string(), [u, u]).note("64x64 truncation"))
    })
}

fn cs_commutator_suite(o: &SuiteOptions) -> SuiteReport {
    run_cases("cs-commutator", Metric::Ulps, 100, 2.0, o, |rng, _, tol| {
        let spec = coherent_spec(rng)?;
        let t = build_tables(&spec)?;
        let m = ladder_matrices(&t, 32)?;
        let dense = commutator_matrix(&m);
        let (mut worst_dense, mut worst_rho) = (0.0f64, 0.0f64);
        for (n, d) in dense.iter().enumerate().skip(1) {
            worst_dense = worst_dense.max(commutator_ulps(&t, n, *d)?);
            worst_rho = worst_rho.max(commutator_ulps(&t, n, commutator_from_rho(&t, n)?)?);
        }
        Ok(Case::new(fmt_params(&spec.params), spec.z.idempotent_string(), [worst_dense, worst_dense])
            .verdict(worst_dense <= tol && worst_rho <= RHO_FORM_ULPS)
            .note(format!(
                "dense matrix vs f^2 difference; rho-ratio form {worst_rho:.2} ulps (limit {RHO_FORM_ULPS})"
            )))
    })
}

fn cs_positivity_suite(o: &SuiteOptions) -> SuiteReport {
    run_cases("cs-positivity", Metric::Flag, 100, 0.0, o, |rng, _, _| {
        let (p, q) = loop {
            let s = admissible_shape(rng, 2);
            if s.0 + s.1 > 0 {
                break s;
            }
        };
        let (pr, s) = retry(rng, |r| {
            let mut a: Vec<BiComplex> = (0..p).map(|_| real_param(r, 0.2, 3.0)).collect();
            let mut b: Vec<BiComplex> = (0..q).map(|_| real_param(r, 0.2, 3.0)).collect();
            let s = r.gen_range_usize(1, 2) as u8;
            let k = r.gen_range_usize(0, p + q - 1);
            let target = if k < p { &mut a[k] } else { &mut b[k - p] };
            let flip = if s == 1 { BiComplex::E1 } else { BiComplex::E2 };
            *target = *target - flip * (*target * 2.0);
            if !off_poles(*target, POLE_GAP) {
                return None;
            }
            PfqParams::new(a, b).ok().map(|pr| (pr, s))
        })
        .ok_or_else(no_sample)?;
        let spec = CoherentSpec::new(pr, BiComplex::from_real(0.3), DEFAULT_TRUNCATION);
        let outcome = spec.and_then(|sp| build_tables(&sp).map(|_| ()));
        let ok = matches!(outcome, Err(Error::Positivity { component, index: 0 }) if component == s);
        let flag = if ok { 0.0 } else { 1.0 };
        let note = match &outcome {
            Ok(()) => "accepted".to_string(),
            Err(e) => e.to_string(),
        };
        Ok(Case::new(String::new(), String::new(), [flag; 2])
            .verdict(ok)
            .note(format!("sign flipped in component {s}: {note}")))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64, n: usize) -> SuiteOptions {
        SuiteOptions { seed, samples: Some(n), tol: None }
    }

    #[test]
    fn every_listed_suite_runs() {
        for id in suite_ids() {
            let n = if id == "thm2.2" { 8 } else { 3 };
            let r = run(id, &small(7, n)).unwrap();
            assert_eq!(r.len(), 1);
            assert_eq!(r[0].rows.len(), r[0].samples);
            assert!(r[0].ok(), "{id}: {:#?}", r[0].rows.iter().filter(|x| !x.passed).collect::<Vec<_>>());
        }
        assert!(run("thm9.9", &small(7, 1)).is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run("thm4.1", &small(11, 20)).unwrap();
        let b = run("thm4.1", &small(11, 20)).unwrap();
        assert_eq!(a, b);
        let c = run("thm4.1", &small(12, 20)).unwrap();
        assert_ne!(a[0].rows[0].seed, c[0].rows[0].seed);
    }

    #[test]
    fn tolerance_override_applies_to_residual_suites() {
        let r = run("thm4.1", &SuiteOptions { seed: 7, samples: Some(5), tol: Some(0.0) }).unwrap();
        assert_eq!(r[0].tolerance, 0.0);
        let r = run("thm7.1", &SuiteOptions { seed: 7, samples: Some(2), tol: Some(0.0) }).unwrap();
        assert_eq!(r[0].tolerance, 2.0);
    }
}
