//! End-to-end properties across modules, on randomly drawn sequences.

#![allow(clippy::needless_range_loop)]

use delone::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn perturbation() -> impl Strategy<Value = SequenceSpec> {
    prop_oneof![
        (-0.5f64..0.9).prop_map(|epsilon| SequenceSpec::ConstantShift { epsilon }),
        (-0.3f64..0.3, 0.2f64..3.0)
            .prop_map(|(epsilon, omega)| SequenceSpec::Periodic { epsilon, omega }),
        (-0.3f64..0.3).prop_map(|epsilon| SequenceSpec::SineOverN {
            epsilon,
            kappa: std::f64::consts::SQRT_2
        }),
        (0.0f64..0.3, 0.5f64..2.0).prop_map(|(r, d)| SequenceSpec::Homographic {
            a: r,
            b: 0.0,
            c: 1.0,
            d
        }),
        Just(SequenceSpec::BetaInteger(BetaKind::Golden)),
    ]
}

fn renormalized(spec: SequenceSpec, n_max: usize) -> RenormalizedSequence {
    let s = make_sequence(spec).unwrap();
    renormalize(&s, mu_sequence(&s, n_max, 1e-12).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn poisson_like_law_is_normalized(spec in perturbation(), t in 0.0f64..50.0) {
        let s = make_sequence(spec).unwrap();
        let total: f64 = (0..300).map(|n| stats::poisson_like_pmf(&s, t, n).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn renormalized_factorials(spec in perturbation()) {
        let ren = renormalized(spec, 30);
        let lf = ren.log_factorials().unwrap();
        let m = ren.moments();
        for n in 0..=30 {
            let want = m.ln_mu(n) - m.ln_mu(0) + ren.base().log_factorial(n).unwrap();
            prop_assert!((lf[n] - want).abs() < 1e-9);
        }
    }

    #[test]
    fn operator_identities_on_leading_block(spec in perturbation(), dim in 3usize..20) {
        let ren = renormalized(spec, 24);
        let (q, p) = position_momentum(&ren, dim).unwrap();
        prop_assert_eq!(q.sub(&q.adjoint()).max_abs(), 0.0);
        prop_assert_eq!(p.sub(&p.adjoint()).max_abs(), 0.0);
        let (a, ad) = ladder_matrices(&ren, dim).unwrap();
        let jumps: Vec<f64> = (0..dim).map(|n| ren.value(n + 1) - ren.value(n)).collect();
        let diff = a.commutator(&ad).sub(&OperatorMatrix::from_diagonal(&jumps));
        prop_assert!(diff.max_abs_leading(dim - 1) < 1e-12);
    }

    #[test]
    fn uncertainty_paths_agree(spec in perturbation(), r in 0.0f64..3.0, theta in 0.0f64..6.3) {
        let ren = renormalized(spec, 60);
        let z = Complex64::from_polar(r, theta);
        let dim = quantize::auto_dim(&ren, r, 1e-12).unwrap();
        let u = uncertainty_product(&ren, z, dim, 1e-12).unwrap();
        prop_assert!((u.product - u.via_commutator).abs() < 1e-8);
        prop_assert!(u.lower_bound - 1e-12 <= u.product && u.product <= u.upper_bound + 1e-12);
    }

    #[test]
    fn naturals_lower_symbols(re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let s = DeloneSequence::naturals();
        let z = Complex64::new(re, im);
        let dim = quantize::auto_dim(&s, z.norm(), 1e-14).unwrap();
        let (q, p) = position_momentum(&s, dim).unwrap();
        let lq = lower_symbol(&q, &s, z, 1e-14).unwrap().value;
        let lp = lower_symbol(&p, &s, z, 1e-14).unwrap().value;
        prop_assert!((lq.re - std::f64::consts::SQRT_2 * re).abs() < 1e-8);
        prop_assert!((lp.re - std::f64::consts::SQRT_2 * im).abs() < 1e-8);
    }

    #[test]
    fn projective_gha(a in 0.0f64..0.5, d in 0.1f64..5.0) {
        let s = make_sequence(SequenceSpec::Homographic { a, b: 0.0, c: 1.0, d }).unwrap();
        let m = GhaModel::new(&s).unwrap();
        for n in [0usize, 1, 2, 10, 999] {
            let x = s.value(n);
            prop_assert!((m.gamma_of(x).unwrap() + s.alpha(n)).abs() < 1e-10);
            prop_assert!((m.h_of(x).unwrap() - s.value(n + 1)).abs() < 1e-10);
        }
    }
}

#[test]
fn quantized_identity_within_tolerance() {
    let tol = 1e-10;
    for spec in [
        SequenceSpec::SineOverN {
            epsilon: 0.1,
            kappa: std::f64::consts::SQRT_2,
        },
        SequenceSpec::inverse_square(0.04),
    ] {
        let ren = renormalized(spec, 20);
        let one = quantize_radial(&ren, &Monomial::One, 12, tol).unwrap();
        assert!(one.sub(&OperatorMatrix::identity(12)).max_abs() < 10.0 * tol);
    }
}

#[test]
fn nu_density_routes_agree_for_golden() {
    let ren = renormalized(SequenceSpec::BetaInteger(BetaKind::Golden), 120);
    assert!(!ren.reordered());
    for t in [0.0, 0.3, 4.0, 25.0] {
        let a = nu_density(&ren, t).unwrap();
        let b = nu_density_expectation(&ren, t).unwrap();
        assert!((a - b).abs() < 1e-8, "t={t}");
    }
}

#[test]
fn hankel_positivity_for_shift() {
    // the factorials of n + ε are moments of a positive measure
    let s = make_sequence(SequenceSpec::ConstantShift { epsilon: 0.3 }).unwrap();
    for h in hankel_determinants(&s, 8).unwrap() {
        assert!(h.det_a.sign > 0.0 && h.det_b.sign > 0.0);
    }
}

#[test]
fn spec_round_trip_through_json() {
    let text = r#"{"family":"fractional_periodic","params":{"lambda":0.2,"mu":1.4142135623730951,"nu":0.0}}"#;
    let spec: SequenceSpec = serde_json::from_str(text).unwrap();
    let s = make_sequence(spec.clone()).unwrap();
    assert_eq!(s.spec(), &spec);
    assert!(certify_delone(&s, 5000).ok);
}
