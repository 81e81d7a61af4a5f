use num_complex::Complex64;
use num_traits::Zero;

use super::graph::Graph;
use crate::error::{dims_err, Error, Result};
use crate::hypermatrix::Tensor3;
use crate::scalar::{Rational, Scalar};

/// Integer tensor of size `k(2k+5) x (2k+1) x (2k+1)` whose system
/// `A(I,v,w) = A(u,I,w) = A(u,v,I) = 0` has a nonzero complex solution
/// iff the graph is 3-colorable.
///
/// Mode-1 slices, with variables `(x_1..x_k, y_1..y_k, t)`:
/// the `k(2k+1)` skew minors `E_pq - E_qp` (`p < q`), forcing `v ∥ w`; then per
/// vertex `E_{x,y} - E_{t,t}`, `E_{y,t} - E_{x,x}`, `E_{x,t} - E_{y,y}`; then per
/// vertex the summed edge terms `E_{xi,xi} + E_{xi,xj} + E_{xj,xj}`.
pub fn tqf_tensor(g: &Graph) -> Tensor3<Rational> {
    let k = g.n();
    let dim = 2 * k + 1;
    let (x, y, t) = (|i: usize| i, |i: usize| k + i, 2 * k);
    let mut entries: Vec<Vec<(usize, usize, i64)>> = Vec::with_capacity(k * (2 * k + 5));
    for p in 0..dim {
        for q in p + 1..dim {
            entries.push(vec![(p, q, 1), (q, p, -1)]);
        }
    }
    for i in 0..k {
        entries.push(vec![(x(i), y(i), 1), (t, t, -1)]);
        entries.push(vec![(y(i), t, 1), (x(i), x(i), -1)]);
        entries.push(vec![(x(i), t, 1), (y(i), y(i), -1)]);
    }
    for i in 0..k {
        let mut s = Vec::new();
        for j in g.neighbors(i) {
            s.extend([(x(i), x(i), 1), (x(i), x(j), 1), (x(j), x(j), 1)]);
        }
        entries.push(s);
    }
    let mut a = Tensor3::<Rational>::zeros([entries.len(), dim, dim]);
    for (s, terms) in entries.iter().enumerate() {
        for &(p, q, c) in terms {
            let cur = a.get(s, p, q).clone();
            a.set(s, p, q, cur + Rational::from_ratio(c, 1));
        }
    }
    a
}

/// Complex contraction of a real tensor leaving one mode free.
pub fn contract_complex(
    a: &Tensor3<f64>,
    free: usize,
    x: &[Complex64],
    y: &[Complex64],
) -> Vec<Complex64> {
    let [l, m, n] = a.dims();
    let mut out = vec![Complex64::zero(); a.dims()[free]];
    for i in 0..l {
        for j in 0..m {
            for k in 0..n {
                let v = *a.get(i, j, k);
                if v == 0.0 {
                    continue;
                }
                match free {
                    0 => out[i] += x[j] * y[k] * v,
                    1 => out[j] += x[i] * y[k] * v,
                    _ => out[k] += x[i] * y[j] * v,
                }
            }
        }
    }
    out
}

/// Max modulus over `A(I,v,w)`, `A(u,I,w)`, `A(u,v,I)`.
pub fn tqf_residual_complex(
    a: &Tensor3<f64>,
    u: &[Complex64],
    v: &[Complex64],
    w: &[Complex64],
) -> Result<f64> {
    let [l, m, n] = a.dims();
    if u.len() != l || v.len() != m || w.len() != n {
        return Err(dims_err("witness lengths do not match the tensor"));
    }
    let r = [
        contract_complex(a, 0, v, w),
        contract_complex(a, 1, u, w),
        contract_complex(a, 2, u, v),
    ];
    Ok(r.iter().flatten().fold(0.0f64, |acc, z| acc.max(z.norm())))
}

pub fn tqf_residual(a: &Tensor3<f64>, u: &[f64], v: &[f64], w: &[f64]) -> Result<f64> {
    let c = |x: &[f64]| {
        x.iter()
            .map(|&r| Complex64::new(r, 0.0))
            .collect::<Vec<_>>()
    };
    tqf_residual_complex(a, &c(u), &c(v), &c(w))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTriple {
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
    pub w: Vec<Complex64>,
}

/// Solution of the [`tqf_tensor`] system from a proper 3-coloring:
/// `v = w = (x, 1/x, 1)` with `x_i = ω^c_i`, and `u` a null vector of the
/// linear equations `A(u,I,w) = A(u,v,I) = 0`.
pub fn tqf_witness(g: &Graph, colors: &[u8]) -> Result<ComplexTriple> {
    let z = super::quadratic::lift_coloring(g, colors)?.to_complex();
    let a = tqf_tensor(g).to_f64();
    let [l, m, n] = a.dims();
    // rows: for each j, Σ_i u_i Σ_k a_ijk w_k; for each k, Σ_i u_i Σ_j a_ijk v_j
    let mut rows = vec![vec![Complex64::zero(); l]; m + n];
    for i in 0..l {
        for j in 0..m {
            for k in 0..n {
                let v = *a.get(i, j, k);
                if v != 0.0 {
                    rows[j][i] += z[k] * v;
                    rows[m + k][i] += z[j] * v;
                }
            }
        }
    }
    let u = complex_null_vector(rows, l)
        .ok_or_else(|| Error::Oracle("linear system for u has only the zero solution".into()))?;
    Ok(ComplexTriple {
        u,
        v: z.clone(),
        w: z,
    })
}

/// A unit null vector by Gauss-Jordan elimination with partial pivoting; the
/// last free column is set to one.
pub fn complex_null_vector(mut rows: Vec<Vec<Complex64>>, cols: usize) -> Option<Vec<Complex64>> {
    let scale = rows
        .iter()
        .flatten()
        .fold(0.0f64, |m, z| m.max(z.norm()))
        .max(1.0);
    let eps = 1e-12 * scale;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let (best, norm) = (r..rows.len())
            .map(|i| (i, rows[i][c].norm()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if norm <= eps {
            continue;
        }
        rows.swap(r, best);
        let p = rows[r][c];
        rows[r].iter_mut().for_each(|z| *z /= p);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != Complex64::zero() {
                    row.iter_mut()
                        .zip(&pivot_row)
                        .for_each(|(z, q)| *z -= f * q);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free = (0..cols).rev().find(|c| !pivots.contains(c))?;
    let mut x = vec![Complex64::zero(); cols];
    x[free] = Complex64::new(1.0, 0.0);
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = -rows[row][free];
    }
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Some(x.into_iter().map(|z| z / norm).collect())
}

/// `2l x 2m x 2n` real tensor whose real solutions correspond to the complex
/// solutions of the input: `B_i = [A_i 0; 0 -A_i]`, `B_{l+i} = [0 A_i; A_i 0]`.
pub fn tensor_complexify<T: Scalar>(a: &Tensor3<T>) -> Tensor3<T> {
    let [l, m, n] = a.dims();
    let mut out = Tensor3::zeros([2 * l, 2 * m, 2 * n]);
    for i in 0..l {
        for j in 0..m {
            for k in 0..n {
                let v = a.get(i, j, k);
                if v.is_zero() {
                    continue;
                }
                out.set(i, j, k, v.clone());
                out.set(i, m + j, n + k, -v.clone());
                out.set(l + i, j, n + k, v.clone());
                out.set(l + i, m + j, k, v.clone());
            }
        }
    }
    out
}

/// Real witness for [`tensor_complexify`]: `u' = (Re u, -Im u)`,
/// `v' = (Re v, Im v)`, `w' = (Re w, Im w)`.
pub fn complexify_triple(t: &ComplexTriple) -> [Vec<f64>; 3] {
    let split = |x: &[Complex64], sign: f64| -> Vec<f64> {
        x.iter()
            .map(|z| z.re)
            .chain(x.iter().map(|z| sign * z.im))
            .collect()
    };
    [split(&t.u, -1.0), split(&t.v, 1.0), split(&t.w, 1.0)]
}

/// Inverse of [`complexify_triple`].
pub fn decomplexify_triple(u: &[f64], v: &[f64], w: &[f64]) -> Result<ComplexTriple> {
    let join = |x: &[f64], sign: f64| -> Result<Vec<Complex64>> {
        if x.len() % 2 != 0 {
            return Err(dims_err("split vector must have even length"));
        }
        let h = x.len() / 2;
        Ok((0..h)
            .map(|i| Complex64::new(x[i], sign * x[h + i]))
            .collect())
    };
    Ok(ComplexTriple {
        u: join(u, -1.0)?,
        v: join(v, 1.0)?,
        w: join(w, 1.0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn dimensions_and_entries() {
        let k3 = Graph::complete(3).unwrap();
        let a = tqf_tensor(&k3);
        assert_eq!(a.dims(), [33, 7, 7]);
        let minors = 3 * 7;
        for s in 0..minors {
            let sl = a.slice_mode1(s);
            assert!(sl
                .data()
                .iter()
                .all(|v| *v == int(0) || *v == int(1) || *v == int(-1)));
            assert_eq!(sl.transpose(), sl.scale(&int(-1)));
        }
        assert_eq!(tqf_tensor(&Graph::empty(1).unwrap()).dims(), [7, 3, 3]);
    }

    #[test]
    fn k3_witness_solves_the_system() {
        let k3 = Graph::complete(3).unwrap();
        let t = tqf_witness(&k3, &[0, 1, 2]).unwrap();
        let a = tqf_tensor(&k3).to_f64();
        assert!(tqf_residual_complex(&a, &t.u, &t.v, &t.w).unwrap() < 1e-10);
        assert!(t.u.iter().any(|z| z.norm() > 0.1));
    }

    #[test]
    fn complexified_witness() {
        let k3 = Graph::complete(3).unwrap();
        let t = tqf_witness(&k3, &[1, 2, 0]).unwrap();
        let a = tqf_tensor(&k3);
        let b = tensor_complexify(&a).to_f64();
        assert_eq!(b.dims(), [66, 14, 14]);
        let [u, v, w] = complexify_triple(&t);
        assert!(tqf_residual(&b, &u, &v, &w).unwrap() < 1e-10);
        assert_eq!(decomplexify_triple(&u, &v, &w).unwrap(), t);
        assert!(tensor_complexify(&Tensor3::<f64>::zeros([2, 2, 2])).is_zero());
    }
}
