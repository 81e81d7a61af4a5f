use num_complex::Complex64;
use num_traits::Zero;

use super::graph::Graph;
use crate::error::{dims_err, Error, Result};
use crate::hypermatrix::{Matrix, Tensor3};
use crate::scalar::{int, rat, Rational};

/// Homogeneous quadratic equations `xᵀ A_i x = 0`, one symmetric matrix each.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSystem {
    dim: usize,
    matrices: Vec<Matrix<Rational>>,
}

/// A complex vector stored as real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexVector {
    pub fn from_complex(z: &[Complex64]) -> Self {
        Self {
            re: z.iter().map(|c| c.re).collect(),
            im: z.iter().map(|c| c.im).collect(),
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.re.iter().chain(&self.im).all(|x| *x == 0.0)
    }

    /// The real vector `(re, im)`, a witness for the complexified system.
    pub fn split(&self) -> Vec<f64> {
        self.re.iter().chain(&self.im).copied().collect()
    }

    /// Inverse of [`split`](Self::split).
    pub fn join(x: &[f64]) -> Result<Self> {
        if x.len() % 2 != 0 {
            return Err(dims_err("split vector must have even length"));
        }
        let (re, im) = x.split_at(x.len() / 2);
        Ok(Self {
            re: re.to_vec(),
            im: im.to_vec(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeForm {
    /// One equation `x_i² + x_i x_j + x_j²` per edge.
    PerEdge,
    /// One equation per vertex summing the edge terms over its neighbors.
    Aggregated,
}

impl QuadraticSystem {
    pub fn new(dim: usize, matrices: Vec<Matrix<Rational>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput(
                "quadratic system needs at least one variable".into(),
            ));
        }
        for (i, a) in matrices.iter().enumerate() {
            if a.rows() != dim || a.cols() != dim {
                return Err(dims_err(format!(
                    "matrix {i} is {}x{}, expected {dim}x{dim}",
                    a.rows(),
                    a.cols()
                )));
            }
            if !a.is_symmetric() {
                return Err(Error::InvalidInput(format!("matrix {i} is not symmetric")));
            }
        }
        Ok(Self { dim, matrices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[Matrix<Rational>] {
        &self.matrices
    }

    pub fn is_square(&self) -> bool {
        self.len() == self.dim
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(dims_err(format!(
                "vector of length {} for {} variables",
                x.len(),
                self.dim
            )));
        }
        Ok(self
            .matrices
            .iter()
            .map(|a| {
                let mut s = 0.0;
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        let v = a.get(i, j);
                        if !v.is_zero() {
                            s += crate::Scalar::to_f64(v) * x[i] * x[j];
                        }
                    }
                }
                s
            })
            .collect())
    }

    pub fn evaluate_exact(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        self.matrices.iter().map(|a| a.bilinear(x, x)).collect()
    }

    /// `zᵀ A_i z` in complex arithmetic (no conjugation).
    pub fn evaluate_complex(&self, z: &ComplexVector) -> Result<Vec<Complex64>> {
        if z.re.len() != self.dim || z.im.len() != self.dim {
            return Err(dims_err("complex vector length does not match the system"));
        }
        let z = z.to_complex();
        Ok(self
            .matrices
            .iter()
            .map(|a| {
                let mut s = Complex64::zero();
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        let v = a.get(i, j);
                        if !v.is_zero() {
                            s += z[i] * z[j] * crate::Scalar::to_f64(v);
                        }
                    }
                }
                s
            })
            .collect())
    }

    /// Stack the matrices as mode-1 slices of an `len x dim x dim` tensor.
    pub fn to_tensor(&self) -> Result<Tensor3<Rational>> {
        if self.is_empty() {
            return Err(Error::InvalidInput(
                "empty system has no tensor form".into(),
            ));
        }
        Tensor3::from_slices(&self.matrices)
    }

    pub fn from_tensor(t: &Tensor3<Rational>) -> Result<Self> {
        let [l, m, n] = t.dims();
        if m != n {
            return Err(dims_err(format!("slices must be square, got {m}x{n}")));
        }
        Self::new(n, (0..l).map(|i| t.slice_mode1(i)).collect())
    }
}

/// Variable layout of the color encoding: `x_0..x_{n-1}, y_0..y_{n-1}, z`.
fn xv(i: usize) -> usize {
    i
}

fn yv(n: usize, i: usize) -> usize {
    n + i
}

fn zv(n: usize) -> usize {
    2 * n
}

/// Symmetric matrix of the form `Σ c · x_a x_b`.
fn form(dim: usize, terms: &[(usize, usize, i64)]) -> Matrix<Rational> {
    let mut a = Matrix::zeros(dim, dim);
    for &(p, q, c) in terms {
        if p == q {
            a.add_at(p, p, int(c));
        } else {
            a.add_at(p, q, rat(c, 2));
            a.add_at(q, p, rat(c, 2));
        }
    }
    a
}

fn edge_terms(i: usize, j: usize) -> [(usize, usize, i64); 3] {
    [(xv(i), xv(i), 1), (xv(i), xv(j), 1), (xv(j), xv(j), 1)]
}

/// Quadratics in `2n+1` variables with a nonzero complex root exactly when
/// the graph is 3-colorable. Per vertex: `x y - z²`, `y z - x²`, `x z - y²`;
/// then the edge equations in the chosen form.
pub fn color_encode(g: &Graph, edge_form: EdgeForm) -> QuadraticSystem {
    let n = g.n();
    let dim = 2 * n + 1;
    let z = zv(n);
    let mut mats = Vec::with_capacity(4 * n + g.m());
    for i in 0..n {
        let (x, y) = (xv(i), yv(n, i));
        mats.push(form(dim, &[(x, y, 1), (z, z, -1)]));
        mats.push(form(dim, &[(y, z, 1), (x, x, -1)]));
        mats.push(form(dim, &[(x, z, 1), (y, y, -1)]));
    }
    match edge_form {
        EdgeForm::PerEdge => {
            for &(i, j) in g.edges() {
                mats.push(form(dim, &edge_terms(i, j)));
            }
        }
        EdgeForm::Aggregated => {
            for i in 0..n {
                let terms: Vec<_> = g.neighbors(i).flat_map(|j| edge_terms(i, j)).collect();
                mats.push(form(dim, &terms));
            }
        }
    }
    QuadraticSystem {
        dim,
        matrices: mats,
    }
}

pub fn cube_root_of_unity(color: u8) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f64::from(color % 3) / 3.0)
}

/// Root of the color encoding from a proper coloring with colors `0, 1, 2`
/// standing for `1, ω, ω²`: `x_i = ω^c_i`, `y_i = 1/x_i`, `z = 1`.
pub fn lift_coloring(g: &Graph, colors: &[u8]) -> Result<ComplexVector> {
    if colors.len() != g.n() {
        return Err(dims_err(format!(
            "{} colors for {} vertices",
            colors.len(),
            g.n()
        )));
    }
    if let Some(&c) = colors.iter().find(|&&c| c > 2) {
        return Err(Error::InvalidInput(format!("color {c} is not in 0..=2")));
    }
    if let Some(&(a, b)) = g.edges().iter().find(|&&(a, b)| colors[a] == colors[b]) {
        return Err(Error::ImproperColoring(a, b));
    }
    let x: Vec<Complex64> = colors.iter().map(|&c| cube_root_of_unity(c)).collect();
    let mut z: Vec<Complex64> = x.clone();
    z.extend(x.iter().map(|c| c.inv()));
    z.push(Complex64::new(1.0, 0.0));
    Ok(ComplexVector::from_complex(&z))
}

/// Real system in `2n` variables whose nonzero roots `(a, b)` are the
/// nonzero complex roots `a + ib` of the input: each `A` gives
/// `[A 0; 0 -A]` (real part) and `[0 A; A 0]` (twice the imaginary part).
pub fn complexify_system(qs: &QuadraticSystem) -> QuadraticSystem {
    let n = qs.dim;
    let mut mats = Vec::with_capacity(2 * qs.len());
    for a in &qs.matrices {
        let neg = a.scale(&int(-1));
        let mut re = Matrix::zeros(2 * n, 2 * n);
        let mut im = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                re.set(i, j, a.get(i, j).clone());
                re.set(n + i, n + j, neg.get(i, j).clone());
                im.set(i, n + j, a.get(i, j).clone());
                im.set(n + i, j, a.get(i, j).clone());
            }
        }
        mats.push(re);
        mats.push(im);
    }
    QuadraticSystem {
        dim: 2 * n,
        matrices: mats,
    }
}

/// Pad to `equations` equations in `vars` variables without changing
/// feasibility: matrices are embedded top-left, zero matrices fill the gap and
/// the last equation is `[0 0; 0 I]`, forcing the new variables to zero.
pub fn pad_system(qs: &QuadraticSystem, equations: usize, vars: usize) -> Result<QuadraticSystem> {
    if equations < qs.len() + 1 {
        return Err(Error::InvalidInput(format!(
            "padding needs at least {} equations, got {equations}",
            qs.len() + 1
        )));
    }
    if vars < qs.dim {
        return Err(Error::InvalidInput(format!(
            "padding needs at least {} variables, got {vars}",
            qs.dim
        )));
    }
    let mut mats: Vec<Matrix<Rational>> = qs
        .matrices
        .iter()
        .map(|a| a.embed(vars, vars, 0, 0))
        .collect();
    mats.extend((qs.len()..equations - 1).map(|_| Matrix::zeros(vars, vars)));
    let extra = vars - qs.dim;
    mats.push(Matrix::<Rational>::identity(extra).embed(vars, vars, qs.dim, qs.dim));
    Ok(QuadraticSystem {
        dim: vars,
        matrices: mats,
    })
}

/// Square real system that is feasible iff the graph is 3-colorable:
/// color encoding, padded to `(m+1) x (m+1)`, then complexified.
pub fn threecolor_qf_pipeline(g: &Graph, edge_form: EdgeForm) -> QuadraticSystem {
    let enc = color_encode(g, edge_form);
    let size = enc.len() + 1;
    let padded = pad_system(&enc, size, size).expect("padding sizes are valid by construction");
    complexify_system(&padded)
}

/// Carry a color-encoding root through the pipeline's padding and
/// complexification.
pub fn pipeline_witness(g: &Graph, edge_form: EdgeForm, z: &ComplexVector) -> Result<Vec<f64>> {
    let enc_len = color_encode(g, edge_form).len();
    let dim = 2 * g.n() + 1;
    if z.re.len() != dim {
        return Err(dims_err("witness does not match the color encoding"));
    }
    let size = enc_len + 1;
    let pad = |v: &[f64]| {
        v.iter()
            .copied()
            .chain(std::iter::repeat(0.0))
            .take(size)
            .collect::<Vec<_>>()
    };
    Ok(ComplexVector {
        re: pad(&z.re),
        im: pad(&z.im),
    }
    .split())
}
