use hypermat::hypermatrix::io::{
    parse_tensor, tensor_to_string_exact, tensor_to_string_float, AnyTensor,
};
use hypermat::hypermatrix::Slot;
use hypermat::scalar::int;
use hypermat::spectral::{cubic_form, cubic_form_gradient};
use hypermat::{Matrix, Rational, Tensor3};
use proptest::prelude::*;

fn small_int() -> impl Strategy<Value = i64> {
    -5i64..=5
}

fn int_vec(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(small_int().prop_map(int), n)
}

fn int_tensor(dims: [usize; 3]) -> impl Strategy<Value = Tensor3<Rational>> {
    prop::collection::vec(small_int(), dims.iter().product::<usize>())
        .prop_map(move |e| Tensor3::from_integers(dims, &e).unwrap())
}

fn int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix<Rational>> {
    prop::collection::vec(small_int().prop_map(int), rows * cols)
        .prop_map(move |d| Matrix::new(rows, cols, d).unwrap())
}

fn float_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

fn float_tensor(dims: [usize; 3]) -> impl Strategy<Value = Tensor3<f64>> {
    prop::collection::vec(-2.0f64..2.0, dims.iter().product::<usize>())
        .prop_map(move |e| Tensor3::new(dims, e).unwrap())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trilinear_form_is_linear_exactly(
        a in int_tensor([2, 3, 2]),
        x in int_vec(2), x2 in int_vec(2), y in int_vec(3), z in int_vec(2),
        p in small_int(), q in small_int(),
    ) {
        let (p, q) = (int(p), int(q));
        let mix: Vec<Rational> = x.iter().zip(&x2).map(|(u, v)| &p * u + &q * v).collect();
        let lhs = a.trilinear_form(&mix, &y, &z).unwrap();
        let rhs = &p * a.trilinear_form(&x, &y, &z).unwrap() + &q * a.trilinear_form(&x2, &y, &z).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn trilinear_form_is_linear_in_floats(
        a in float_tensor([3, 2, 3]),
        x in float_vec(3), x2 in float_vec(3), y in float_vec(2), z in float_vec(3),
        p in -3.0f64..3.0, q in -3.0f64..3.0,
    ) {
        let mix: Vec<f64> = x.iter().zip(&x2).map(|(u, v)| p * u + q * v).collect();
        let lhs = a.trilinear_form(&mix, &y, &z).unwrap();
        let rhs = p * a.trilinear_form(&x, &y, &z).unwrap() + q * a.trilinear_form(&x2, &y, &z).unwrap();
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale * 10.0);
    }

    #[test]
    fn mlmul_composes(
        a in int_tensor([2, 2, 3]),
        x in int_matrix(2, 3), x2 in int_matrix(3, 2),
        y in int_matrix(2, 2), y2 in int_matrix(2, 1),
        z in int_matrix(3, 2), z2 in int_matrix(2, 2),
    ) {
        let once = a.mlmul(&x.matmul(&x2).unwrap(), &y.matmul(&y2).unwrap(), &z.matmul(&z2).unwrap()).unwrap();
        let twice = a.mlmul(&x, &y, &z).unwrap().mlmul(&x2, &y2, &z2).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn outer_product_norm_factors(x in float_vec(3), y in float_vec(2), z in float_vec(4)) {
        let t = Tensor3::outer_product(&x, &y, &z).unwrap();
        let expected = norm(&x) * norm(&y) * norm(&z);
        prop_assert!((t.frobenius_norm() - expected).abs() <= 1e-12 * (1.0 + expected));
    }

    #[test]
    fn symmetric_contractions_agree(a in int_tensor([3, 3, 3]), x in int_vec(3)) {
        let s = a.symmetrize().unwrap();
        let c0 = s.contract_to_vector([Slot::Identity, Slot::Vector(&x), Slot::Vector(&x)]).unwrap();
        let c1 = s.contract_to_vector([Slot::Vector(&x), Slot::Identity, Slot::Vector(&x)]).unwrap();
        let c2 = s.contract_to_vector([Slot::Vector(&x), Slot::Vector(&x), Slot::Identity]).unwrap();
        prop_assert_eq!(&c0, &c1);
        prop_assert_eq!(&c1, &c2);
    }

    #[test]
    fn gradient_matches_finite_differences(a in float_tensor([3, 3, 3]), x in float_vec(3)) {
        let s = a.symmetrize().unwrap();
        let g = cubic_form_gradient(&s, &x).unwrap();
        let h = 1e-5;
        for k in 0..3 {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[k] += h;
            xm[k] -= h;
            let fd = (cubic_form(&s, &xp).unwrap() - cubic_form(&s, &xm).unwrap()) / (2.0 * h);
            prop_assert!((fd - g[k]).abs() < 1e-6);
        }
    }

    #[test]
    fn exact_text_roundtrip(a in int_tensor([2, 3, 1])) {
        let parsed = parse_tensor(&tensor_to_string_exact(&a)).unwrap();
        prop_assert_eq!(parsed, AnyTensor::Exact(a));
    }

    #[test]
    fn float_text_roundtrip(a in float_tensor([2, 2, 2])) {
        let parsed = parse_tensor(&tensor_to_string_float(&a)).unwrap();
        prop_assert_eq!(parsed, AnyTensor::Float(a));
    }
}

#[test]
fn parse_errors_carry_positions() {
    let err = parse_tensor("{\"dims\":[2,2,2],\n \"entries\":[1,2,3]}").unwrap_err();
    assert!(
        matches!(err, hypermat::Error::Parse { line: 2, .. }),
        "{err}"
    );
    let err = parse_tensor("{\"dims\":[1,1,1],\"entries\":[\"1/0\"]}").unwrap_err();
    assert!(matches!(err, hypermat::Error::Parse { .. }), "{err}");
}
