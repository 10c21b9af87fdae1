//! Cross-module properties through the public API.

use bchyper::coherent::{build_tables, inner_product, positivity_gate, CoherentSpec};
use bchyper::hyper::{check_component_domain, classify, pfq_value, ConvergenceKind, PfqParams};
use bchyper::identities::{contiguous_alpha_plus, derivative_relation, quad_even, quad_odd, IdentityReport, Shift};
use bchyper::{BiComplex, Error};
use num_complex::Complex64;
use proptest::prelude::*;

fn comp(re: (f64, f64), im: (f64, f64)) -> impl Strategy<Value = Complex64> {
    (re.0..re.1, im.0..im.1).prop_map(|(a, b)| Complex64::new(a, b))
}

fn param() -> impl Strategy<Value = BiComplex> {
    (comp((0.2, 3.0), (-1.0, 1.0)), comp((0.2, 3.0), (-1.0, 1.0))).prop_map(|(a, b)| BiComplex::from_idempotent(a, b))
}

fn in_disc(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(m, t)| Complex64::from_polar(m, t))
}

fn arg(r: f64) -> impl Strategy<Value = BiComplex> {
    (in_disc(r), in_disc(r)).prop_map(|(a, b)| BiComplex::from_idempotent(a, b))
}

/// Parameters and argument of a 2F1 inside the unit ball.
fn gauss_case() -> impl Strategy<Value = (PfqParams, BiComplex)> {
    (param(), param(), param(), arg(0.8)).prop_map(|(a1, a2, b, z)| (PfqParams::new(vec![a1, a2], vec![b]).unwrap(), z))
}

/// The diagonal embedding of component `s`: both components equal to it.
fn diagonal(w: BiComplex, s: u8) -> BiComplex {
    let c = w.component(s);
    BiComplex::from_idempotent(c, c)
}

fn diagonal_params(p: &PfqParams, s: u8) -> PfqParams {
    let map = |v: &[BiComplex]| v.iter().map(|x| diagonal(*x, s)).collect();
    PfqParams::new(map(p.alphas()), map(p.betas())).unwrap()
}

/// Running an identity on each component alone reproduces that
/// component's residual exactly: the bicomplex identity is two classical
/// ones side by side.
fn decomposes(p: &PfqParams, z: BiComplex, check: impl Fn(&PfqParams, BiComplex) -> IdentityReport) {
    let full = check(p, z);
    for s in [1u8, 2] {
        let alone = check(&diagonal_params(p, s), diagonal(z, s));
        assert_eq!(alone.residual.h1, full.residual.component(s));
        assert_eq!(alone.residual.h2, full.residual.component(s));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identities_decompose_by_component((p, z) in gauss_case(), m in 0u32..3, n in 0u32..3) {
        decomposes(&p, z, |p, z| quad_even(p, z).unwrap());
        decomposes(&p, z, |p, z| quad_odd(p, z).unwrap());
        decomposes(&p, z, |p, z| derivative_relation(p, z, 2).unwrap());
        decomposes(&p, z, |p, z| contiguous_alpha_plus(p, z, Shift::new(m, n)).unwrap());
    }

    #[test]
    fn even_and_odd_parts_recombine((p, z) in gauss_case()) {
        let even = quad_even(&p, z).unwrap();
        let odd = quad_odd(&p, z).unwrap();
        let twice = pfq_value(&p, z).unwrap() * 2.0;
        let r = IdentityReport::compare(even.lhs + odd.lhs, twice, 1e-9);
        prop_assert!(r.passed, "{r:?}");
        let r = IdentityReport::compare(even.rhs + odd.rhs, twice, 1e-14);
        prop_assert!(r.passed, "{r:?}");
    }

    #[test]
    fn domain_errors_follow_classification(
        p in 0usize..4,
        q in 0usize..3,
        seeds in prop::collection::vec(param(), 7),
        z in arg(1.5),
    ) {
        let pr = PfqParams::new(seeds[..p].to_vec(), seeds[4..4 + q].to_vec()).unwrap();
        let kind = classify(&pr).kind;
        let inside = |s: u8| match kind {
            ConvergenceKind::Entire => true,
            ConvergenceKind::UnitBall | ConvergenceKind::UnitBallBoundaryConvergent => z.component(s).norm() < 1.0 - 1e-12,
            ConvergenceKind::DivergentEverywhere => false,
        };
        // well away from the unit circle, so the boundary rule does not enter
        prop_assume!([1u8, 2].iter().all(|&s| (z.component(s).norm() - 1.0).abs() > 1e-6));
        for s in [1u8, 2] {
            prop_assert_eq!(check_component_domain(&pr.component(s), z.component(s), s).is_ok(), inside(s));
        }
        let value = pfq_value(&pr, z);
        if inside(1) && inside(2) {
            prop_assert!(value.is_ok(), "{value:?}");
        } else {
            prop_assert!(matches!(value, Err(Error::Domain(_))), "{value:?}");
        }
    }

    #[test]
    fn branch_cut_symmetry_of_real_parameters(a in 0.2..3.0f64, b in 0.2..3.0f64, z in in_disc(0.8)) {
        // real parameters: pFq(conj z) = conj pFq(z) per component
        let p = PfqParams::new(vec![BiComplex::from_real(a), BiComplex::ONE], vec![BiComplex::from_real(b)]).unwrap();
        let v = pfq_value(&p, BiComplex::from_idempotent(z, z.conj())).unwrap();
        prop_assert!((v.idem1().conj() - v.idem2()).norm() <= 1e-15 * v.idem1().norm().max(1.0));
    }

    #[test]
    fn coherent_states_are_normalized(a in 0.2..3.0f64, b in 0.2..3.0f64, z in arg(0.8)) {
        let p = PfqParams::new(vec![BiComplex::from_real(a)], vec![BiComplex::from_real(b)]).unwrap();
        let spec = CoherentSpec::new(p, z, 256).unwrap();
        let ip = inner_product(&spec, &spec).unwrap();
        for s in [1u8, 2] {
            prop_assert!((ip.component(s) - 1.0).norm() <= 1e-12, "{ip}");
        }
    }

    #[test]
    fn positivity_gate_matches_ladder_signs(a in -3.0..3.0f64, b in -3.0..3.0f64) {
        prop_assume!((a - a.round()).abs() > 0.05 && (b - b.round()).abs() > 0.05);
        let p = PfqParams::new(vec![BiComplex::from_real(a)], vec![BiComplex::from_real(b)]).unwrap();
        // every f(m)^2 = (m + 1)(b + m)/(a + m) for m < 256 must be positive
        let positive = (0..256).all(|m| (b + m as f64) / (a + m as f64) > 0.0);
        let spec = CoherentSpec::new(p.clone(), BiComplex::from_real(0.3), 256).unwrap();
        prop_assert_eq!(build_tables(&spec).is_ok(), positive);
        prop_assert_eq!(positivity_gate(&p, 256).is_ok(), positive);
    }
}
