use hypermat::gadgets::*;
use hypermat::scalar::{int, rat};
use hypermat::search::{max_abs, restart_rng};
use hypermat::SearchConfig;
use num_complex::Complex64;
use proptest::prelude::*;

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n)
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (Just(n), 0u64..(1u64 << pairs))
        })
        .prop_map(|(n, mask)| Graph::from_pair_mask(n, mask).unwrap())
}

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn complex_residual(qs: &QuadraticSystem, z: &ComplexVector) -> f64 {
    qs.evaluate_complex(z)
        .unwrap()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn colorings_lift_to_roots(g in graph(6)) {
        match g.three_coloring() {
            Some(colors) => {
                for ef in [EdgeForm::PerEdge, EdgeForm::Aggregated] {
                    let z = lift_coloring(&g, &colors).unwrap();
                    prop_assert!(complex_residual(&color_encode(&g, ef), &z) < 1e-12);
                    let x = pipeline_witness(&g, ef, &z).unwrap();
                    prop_assert!(max_abs(&threecolor_qf_pipeline(&g, ef).evaluate(&x).unwrap()) < 1e-12);
                }
            }
            None => {
                let colors = vec![0u8; g.n()];
                let is_improper = matches!(lift_coloring(&g, &colors), Err(hypermat::Error::ImproperColoring(..)));
                prop_assert!(is_improper);
            }
        }
    }

    #[test]
    fn motzkin_straus_identity(g in graph(8)) {
        let omega = clique_number(&g).unwrap() as i64;
        let value = motzkin_straus_value(&g).unwrap();
        prop_assert_eq!(int(2) * value, int(1) - rat(1, omega));
    }

    #[test]
    fn quadratic_complexification_is_exact(g in graph(4), z in complex_vec(9)) {
        let enc = color_encode(&g, EdgeForm::PerEdge);
        let z = ComplexVector::from_complex(&z[..enc.dim()]);
        let complex = enc.evaluate_complex(&z).unwrap();
        let real = complexify_system(&enc).evaluate(&z.split()).unwrap();
        // real and imaginary parts alternate
        for (c, pair) in complex.iter().zip(real.chunks_exact(2)) {
            prop_assert!((c.re - pair[0]).abs() < 1e-12 && (c.im - pair[1]).abs() < 1e-12);
        }
        prop_assert_eq!(ComplexVector::join(&z.split()).unwrap(), z);
    }

    #[test]
    fn triple_transport_roundtrip(u in complex_vec(4), v in complex_vec(3), w in complex_vec(5)) {
        let t = ComplexTriple { u, v, w };
        let [a, b, c] = complexify_triple(&t);
        prop_assert_eq!(decomplexify_triple(&a, &b, &c).unwrap(), t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn query_budget_never_exceeded(n in 1usize..=4, seed in 0u64..1000, answers in prop::collection::vec(any::<bool>(), 8)) {
        let mut rng = restart_rng(seed, 0);
        let (qs, _) = planted_quadratic_system(n, &mut rng).unwrap();
        let mut calls = 0;
        let verdict = qf_via_3qf(&qs, |_| {
            calls += 1;
            Ok(answers[calls.min(answers.len()) - 1])
        });
        let verdict = verdict.unwrap();
        prop_assert!(verdict.queries <= n + 2);
        prop_assert_eq!(verdict.queries, calls);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn clique_tensor_trichotomy(g in graph(7)) {
        let omega = clique_number(&g).unwrap();
        let cfg = SearchConfig::default().with_restarts(32).with_seed(11);
        let m_ell = motzkin_straus_ascent(&g, &cfg).unwrap();
        for ell in 1..=g.n() {
            let sigma = clique_tensor_spectral_norm(&g, ell, &cfg).unwrap().sigma;
            prop_assert!((sigma - clique_tensor_norm(omega, ell)).abs() < 1e-6);
            let expected_sign = (omega as i64 - ell as i64).signum();
            let observed = if (sigma - 1.0).abs() < 1e-6 { 0 } else { (sigma - 1.0).signum() as i64 };
            prop_assert_eq!(observed, expected_sign);
            // ‖A(u,u,I)‖² = 1/ℓ + 2 Σ u_i² u_j², maximized with u_i² on the simplex
            let m = 1.0 / ell as f64 + 2.0 * m_ell;
            prop_assert!((sigma * sigma - m).abs() < 1e-6);
        }
    }
}

#[test]
fn numeric_search_matches_colorability() {
    let cfg = SearchConfig::default().with_restarts(64).with_seed(5);
    let colorable = [
        Graph::complete(3).unwrap(),
        Graph::cycle(5).unwrap(),
        Graph::path(4).unwrap(),
    ];
    for g in &colorable {
        let sys = complexify_system(&color_encode(g, EdgeForm::PerEdge));
        assert!(feasibility_search(&sys, &cfg).unwrap().is_found());
    }
    let blocked = [Graph::complete(4).unwrap(), Graph::wheel(5).unwrap()];
    for g in &blocked {
        assert!(g.three_coloring().is_none());
        let sys = complexify_system(&color_encode(g, EdgeForm::PerEdge));
        assert!(!feasibility_search(&sys, &cfg).unwrap().is_found());
    }
}

#[test]
fn tqf_witnesses_transport_through_complexification() {
    let g = Graph::complete(3).unwrap();
    let a = tqf_tensor(&g);
    let b = tensor_complexify(&a).to_f64();
    for colors in [[0u8, 1, 2], [2, 0, 1], [1, 2, 0]] {
        let t = tqf_witness(&g, &colors).unwrap();
        assert!(tqf_residual_complex(&a.to_f64(), &t.u, &t.v, &t.w).unwrap() < 1e-10);
        let [u, v, w] = complexify_triple(&t);
        assert!(tqf_residual(&b, &u, &v, &w).unwrap() < 1e-10);
    }
}

#[test]
fn qf_decisions_on_known_instances() {
    let cfg = SearchConfig::default().with_restarts(64).with_seed(2);
    for seed in 0..3 {
        let mut rng = restart_rng(seed, 1);
        let (qs, _) = planted_quadratic_system(2, &mut rng).unwrap();
        assert!(qf_via_3qf(&qs, numeric_3qf_oracle(cfg)).unwrap().feasible);
        let qs = definite_quadratic_system(2, &mut rng).unwrap();
        assert!(!qf_via_3qf(&qs, numeric_3qf_oracle(cfg)).unwrap().feasible);
    }
}
