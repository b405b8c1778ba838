use gselab::models::*;
use gselab::quantize::real_series;
use gselab::*;
use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;

type R = Rational64;

fn rational() -> impl Strategy<Value = R> {
    (-30i64..=30, 1i64..=12).prop_map(|(n, d)| R::new(n, d))
}

/// Random one-dimensional polynomial of degree ≤ 4 with rational coefficients.
fn poly1() -> impl Strategy<Value = Poly<R>> {
    prop::collection::vec(((0u32..=2, 0u32..=2), rational()), 1..6).prop_map(|terms| {
        let mut f = Poly::zero(1);
        for ((a, b), c) in terms {
            f.add_term(Monomial::qp(a, b), c);
        }
        f
    })
}

fn state(spec: GridSpec) -> impl Strategy<Value = GridState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), spec.n_points()).prop_map(move |v| {
        let amps = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        GridState::new(spec, amps).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weyl_images_of_real_functions_are_hermitian(f in poly1()) {
        let x = weyl_quantize(&f);
        prop_assert!(x.is_hermitian());
        prop_assert_eq!(x.adjoint(), x);
    }

    #[test]
    fn weyl_is_linear(f in poly1(), g in poly1(), a in rational()) {
        let lhs = weyl_quantize(&(&f.scale(&a) + &g));
        let mut rhs = weyl_quantize(&f).scale_real(&a);
        for (m, c) in weyl_quantize(&g).terms() {
            rhs.add_term(m.clone(), c.clone());
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn operator_product_is_associative(f in poly1(), g in poly1(), k in poly1()) {
        let (x, y, z) = (weyl_quantize(&f), weyl_quantize(&g), weyl_quantize(&k));
        prop_assert_eq!(x.product(&y).product(&z), x.product(&y.product(&z)));
    }

    #[test]
    fn commutator_of_q_and_p_is_i_hbar(n in 1usize..3, k in 0usize..2) {
        let k = k.min(n - 1);
        let q = OperatorPoly::<R>::q_hat(n, k);
        let p = OperatorPoly::<R>::p_hat(n, k);
        let mut comm = q.product(&p);
        for (m, c) in p.product(&q).terms() {
            comm.add_term(m.clone(), c.scale_real(&R::new(-1, 1)));
        }
        let i_hbar = HbarSeries::term(1, num_complex::Complex::new(R::new(0, 1), R::new(1, 1)));
        prop_assert_eq!(comm, OperatorPoly::scalar(n, i_hbar));
    }

    #[test]
    fn unit_lambda_generator_ignores_the_expansion_point(f in poly1(), zq in rational(), zp in rational()) {
        let g = deformed_generator_poly(&f, &[zq], &[zp], &R::new(1, 1), GeneratorMode::Interpolating).unwrap();
        prop_assert_eq!(g, weyl_quantize(&f));
    }

    #[test]
    fn reduction_of_a_single_word_is_order_independent_for_commuting_letters(a in 0u32..4, b in 0u32..4) {
        use gselab::Letter::{P, Q};
        // Letters of different degrees of freedom commute.
        let mut forward = vec![Q(0); a as usize];
        forward.extend(vec![P(1); b as usize]);
        let mut backward = vec![P(1); b as usize];
        backward.extend(vec![Q(0); a as usize]);
        let x = normal_order_reduce(2, &[Word::new(real_series(R::new(1, 1)), forward)]).unwrap();
        let y = normal_order_reduce(2, &[Word::new(real_series(R::new(1, 1)), backward)]).unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn parseval_holds(s in state(GridSpec::centered(64, 8.0).unwrap())) {
        let spec = *s.spec();
        let momentum: f64 = s.momentum_amplitudes().iter().map(|c| c.norm_sqr()).sum::<f64>() * spec.dk();
        prop_assert!((momentum - s.norm_squared()).abs() <= 1e-12 * s.norm_squared().max(1.0));
    }

    #[test]
    fn text_serialization_round_trips(s in state(GridSpec::new(32, -3.5, 4.25).unwrap())) {
        let back = GridState::from_text(&s.to_text()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn metric_distance_is_phase_blind_and_bounded(s in state(GridSpec::centered(32, 5.0).unwrap()), phi in -3.0f64..3.0) {
        let s = s.normalize().unwrap();
        prop_assert!(s.metric_distance(&s.with_phase(phi)).unwrap() < 1e-12);
        let other = s.translated(1.3).normalize().unwrap();
        let d = s.metric_distance(&other).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn split_step_preserves_norm(q0 in -2.0f64..2.0, p0 in -1.5f64..1.5, lambda in 0.0f64..=1.0) {
        let h = DrivenHamiltonian::time_independent(quartic_oscillator(1.0));
        let env = make_envelope(EnvelopeKind::Gaussian { sigma: 1.0 }, &GridSpec::centered(128, 16.0).unwrap()).unwrap();
        let psi0 = closed_form_state(&env, &PhasePoint::single(q0, p0), 0.0, 1.0).unwrap();
        let psi = evolve(&h, &psi0, 0.0, 0.5, &PropagationConfig::new(lambda, 0.01), 1.0).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_state_has_the_requested_centroid(q in -3.0f64..3.0, p in -2.0f64..2.0, phi in -3.0f64..3.0) {
        let env = make_envelope(EnvelopeKind::Hermite { order: 2, sigma: 0.7 }, &GridSpec::centered(256, 16.0).unwrap()).unwrap();
        let s = closed_form_state(&env, &PhasePoint::single(q, p), phi, 1.0).unwrap();
        let (qb, pb) = s.expectation_point(1.0);
        prop_assert!((qb - q).abs() < 1e-9 && (pb - p).abs() < 1e-9);
        prop_assert!((s.position_variance() - env.position_variance()).abs() < 1e-9);
    }
}
