use hypermat::gadgets::tqf_residual;
use hypermat::hypermatrix::Slot;
use hypermat::search::max_abs;
use hypermat::spectral::{
    best_rank1, eig_residual, find_eigenpairs_small, singular_residual, spectral_norm, EigenPair,
    SingularTriple, Variant,
};
use hypermat::{Matrix, SearchConfig, Tensor3};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn float_tensor(dims: [usize; 3]) -> impl Strategy<Value = Tensor3<f64>> {
    prop::collection::vec(-2.0f64..2.0, dims.iter().product::<usize>())
        .prop_map(move |e| Tensor3::new(dims, e).unwrap())
}

fn unit_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n).prop_filter_map("nonzero", |v| {
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (s > 1e-3).then(|| v.iter().map(|x| x / s).collect())
    })
}

fn orthogonal(n: usize) -> impl Strategy<Value = Matrix<f64>> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_filter_map("full rank", move |d| {
        let m = DMatrix::from_row_slice(n, n, &d);
        if m.determinant().abs() < 1e-3 {
            return None;
        }
        let q = m.qr().q();
        Some(Matrix::from_fn(n, n, |i, j| q[(i, j)]))
    })
}

fn cfg() -> SearchConfig {
    SearchConfig::default().with_restarts(16).with_seed(3)
}

/// max over unit u, v of `‖A(u, v, I)‖` on a fine angle grid.
fn grid_norm_222(a: &Tensor3<f64>) -> f64 {
    let steps = 1500;
    let mut best = 0.0f64;
    for p in 0..steps {
        let th = std::f64::consts::PI * p as f64 / steps as f64;
        let u = [th.cos(), th.sin()];
        for q in 0..steps {
            let ph = std::f64::consts::PI * q as f64 / steps as f64;
            let v = [ph.cos(), ph.sin()];
            let g = a
                .contract_to_vector([Slot::Vector(&u), Slot::Vector(&v), Slot::Identity])
                .unwrap();
            best = best.max((g[0] * g[0] + g[1] * g[1]).sqrt());
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn spectral_norm_below_frobenius(a in float_tensor([3, 2, 3])) {
        let c = spectral_norm(&a, &cfg()).unwrap();
        prop_assert!(c.sigma <= a.frobenius_norm() + 1e-12);
        prop_assert_eq!(c.monotonicity.violations, 0);
    }

    #[test]
    fn rank_one_attains_frobenius(x in unit_vec(3), y in unit_vec(2), z in unit_vec(3), s in 0.5f64..3.0) {
        let xs: Vec<f64> = x.iter().map(|v| v * s).collect();
        let a = Tensor3::outer_product(&xs, &y, &z).unwrap();
        let b = best_rank1(&a, &cfg()).unwrap();
        prop_assert!((b.sigma.abs() - a.frobenius_norm()).abs() < 1e-9);
        prop_assert!(b.error < 1e-7);
    }

    #[test]
    fn rotation_invariance(a in float_tensor([3, 3, 2]), p in orthogonal(3), q in orthogonal(3), r in orthogonal(2)) {
        let rotated = a.mlmul(&p, &q, &r).unwrap();
        let s0 = spectral_norm(&a, &cfg()).unwrap().sigma;
        let s1 = spectral_norm(&rotated, &cfg()).unwrap().sigma;
        prop_assert!((s0 - s1).abs() < 1e-6, "{} vs {}", s0, s1);
    }

    #[test]
    fn zero_singular_value_is_the_quadratic_system(a in float_tensor([2, 3, 2]), u in unit_vec(2), v in unit_vec(3), w in unit_vec(2)) {
        let t = SingularTriple { sigma: 0.0, u: u.clone(), v: v.clone(), w: w.clone(), variant: Variant::L2 };
        let (rw, ru, rv) = singular_residual(&a, &t).unwrap();
        let sing = max_abs(&rw).max(max_abs(&ru)).max(max_abs(&rv));
        let quad = tqf_residual(&a, &u, &v, &w).unwrap();
        prop_assert!((sing - quad).abs() < 1e-12);
    }

    #[test]
    fn pythagoras(a in float_tensor([2, 3, 2])) {
        let b = best_rank1(&a, &cfg()).unwrap();
        let gap = b.error * b.error + b.sigma * b.sigma - a.frobenius_norm_sq();
        prop_assert!(gap.abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn grid_oracle_222(a in float_tensor([2, 2, 2])) {
        let c = spectral_norm(&a, &cfg()).unwrap();
        prop_assert!((c.sigma - grid_norm_222(&a)).abs() < 1e-4);
    }

    #[test]
    fn eigen_scaling(a in float_tensor([3, 3, 3]), c in 0.2f64..5.0) {
        let s = a.symmetrize().unwrap();
        for variant in [Variant::L2, Variant::L3] {
            let pairs = find_eigenpairs_small(&s, variant, &cfg()).unwrap();
            for p in pairs {
                let base = max_abs(&eig_residual(&s, &p).unwrap());
                prop_assert!(base < 1e-8);
                let scaled_x: Vec<f64> = p.x.iter().map(|v| v * c).collect();
                let lambda = match variant {
                    Variant::L2 => p.lambda * c,
                    Variant::L3 => p.lambda,
                };
                let scaled = EigenPair { lambda, x: scaled_x, variant };
                let r = max_abs(&eig_residual(&s, &scaled).unwrap());
                prop_assert!(r < 1e-7 * (1.0 + c * c), "{:?} residual {}", variant, r);
            }
        }
    }
}
