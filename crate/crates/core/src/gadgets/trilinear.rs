use num_traits::Zero;
use rand::Rng;

use super::feasibility::feasibility_search;
use super::quadratic::QuadraticSystem;
use crate::error::{dims_err, Error, Result};
use crate::hypermatrix::{Matrix, Tensor3};
use crate::scalar::{int, Rational};
use crate::search::SearchConfig;

/// Bilinear equations in three unit vectors `u ∈ ℝˡ, v ∈ ℝᵐ, w ∈ ℝⁿ`:
///
/// ```text
/// vᵀ A_i w = 0   (A_i is m x n)
/// uᵀ B_j w = 0   (B_j is l x n)
/// uᵀ C_k v = 0   (C_k is l x m)
/// ```
///
/// Systems read off a tensor have `l`, `m`, `n` matrices in the three
/// families; the reduction steps use other counts.
#[derive(Debug, Clone, PartialEq)]
pub struct TrilinearSystem {
    dims: [usize; 3],
    a: Vec<Matrix<Rational>>,
    b: Vec<Matrix<Rational>>,
    c: Vec<Matrix<Rational>>,
}

fn check_family(name: &str, mats: &[Matrix<Rational>], rows: usize, cols: usize) -> Result<()> {
    for (i, m) in mats.iter().enumerate() {
        if m.rows() != rows || m.cols() != cols {
            return Err(dims_err(format!(
                "{name}[{i}] is {}x{}, expected {rows}x{cols}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(())
}

impl TrilinearSystem {
    pub fn new(
        dims: [usize; 3],
        a: Vec<Matrix<Rational>>,
        b: Vec<Matrix<Rational>>,
        c: Vec<Matrix<Rational>>,
    ) -> Result<Self> {
        let [l, m, n] = dims;
        if l == 0 || m == 0 || n == 0 {
            return Err(dims_err("trilinear system dimensions must be positive"));
        }
        check_family("A", &a, m, n)?;
        check_family("B", &b, l, n)?;
        check_family("C", &c, l, m)?;
        Ok(Self { dims, a, b, c })
    }

    /// The system of a tensor: `A_i(j,k) = B_j(i,k) = C_k(i,j) = a_ijk`.
    /// Its solutions are the triples with `A(I,v,w) = A(u,I,w) = A(u,v,I) = 0`.
    pub fn from_tensor(t: &Tensor3<Rational>) -> Self {
        let [l, m, n] = t.dims();
        Self {
            dims: [l, m, n],
            a: (0..l).map(|i| t.slice_mode1(i)).collect(),
            b: (0..m).map(|j| t.slice_mode2(j)).collect(),
            c: (0..n).map(|k| t.slice_mode3(k)).collect(),
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn a_slices(&self) -> &[Matrix<Rational>] {
        &self.a
    }

    pub fn b_slices(&self) -> &[Matrix<Rational>] {
        &self.b
    }

    pub fn c_slices(&self) -> &[Matrix<Rational>] {
        &self.c
    }

    /// All residuals, in the order A, B, C.
    pub fn evaluate(&self, u: &[f64], v: &[f64], w: &[f64]) -> Result<Vec<f64>> {
        let [l, m, n] = self.dims;
        if u.len() != l || v.len() != m || w.len() != n {
            return Err(dims_err("vector lengths do not match the system"));
        }
        let bil = |mat: &Matrix<Rational>, x: &[f64], y: &[f64]| mat.to_f64().bilinear(x, y);
        let mut out = Vec::with_capacity(self.a.len() + self.b.len() + self.c.len());
        for a in &self.a {
            out.push(bil(a, v, w)?);
        }
        for b in &self.b {
            out.push(bil(b, u, w)?);
        }
        for c in &self.c {
            out.push(bil(c, u, v)?);
        }
        Ok(out)
    }
}

/// Gadget matrices `E_00` (or zero when `primed`) and `E_0j - E_j0`.
fn gadget(d: usize, primed: bool) -> Vec<Matrix<Rational>> {
    (0..d)
        .map(|j| {
            let mut g = Matrix::zeros(d, d);
            if j == 0 {
                if !primed {
                    g.set(0, 0, int(1));
                }
            } else {
                g.set(0, j, int(1));
                g.set(j, 0, int(-1));
            }
            g
        })
        .collect()
}

fn gadget_system(a: Vec<Matrix<Rational>>, primed: bool) -> Result<TrilinearSystem> {
    let l = a.len();
    let d = a.first().map(|m| m.rows()).unwrap_or(0);
    if d == 0 || d > l {
        return Err(dims_err(format!(
            "gadget needs 1 <= block size <= {l}, got {d}"
        )));
    }
    let b = gadget(d, primed);
    let c = b.clone();
    TrilinearSystem::new([d, d, d], a, b, c)
}

fn require_square(qs: &QuadraticSystem) -> Result<()> {
    if !qs.is_square() {
        return Err(Error::InvalidInput(format!(
            "system must be square, got {} equations in {} variables",
            qs.len(),
            qs.dim()
        )));
    }
    Ok(())
}

/// The system `S` for a square quadratic system: A-slices from the
/// equations, `B_1 = C_1 = E_11`, `B_i = C_i = E_1i - E_i1`.
pub fn build_3qf(qs: &QuadraticSystem) -> Result<TrilinearSystem> {
    require_square(qs)?;
    gadget_system(qs.matrices().to_vec(), false)
}

/// `S′`: as [`build_3qf`] with `B_1 = C_1 = 0`.
pub fn build_3qf_primed(qs: &QuadraticSystem) -> Result<TrilinearSystem> {
    require_square(qs)?;
    gadget_system(qs.matrices().to_vec(), true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QfVerdict {
    pub feasible: bool,
    pub queries: usize,
}

/// Decide a square quadratic system with a 3QF oracle restricted to
/// `B_i = C_i`, using at most `n + 2` queries.
///
/// Query `S`; if it is infeasible the answer is whether `S′` is feasible.
/// Otherwise every solution of `S` vanishes in the first coordinate, and the
/// search repeats on the lower-right `d x d` blocks of all `A_i`, with
/// `u, v, w ∈ ℝᵈ` and gadgets of the same size. A 1x1 `S` is never feasible,
/// so the fallback below only runs for an inconsistent oracle: the answer is
/// then whether every `A_i` has a zero `(n, n)` entry.
pub fn qf_via_3qf<F>(qs: &QuadraticSystem, mut oracle: F) -> Result<QfVerdict>
where
    F: FnMut(&TrilinearSystem) -> Result<bool>,
{
    require_square(qs)?;
    let n = qs.dim();
    let budget = n + 2;
    let mut queries = 0;
    let mut ask = |sys: &TrilinearSystem, queries: &mut usize| -> Result<bool> {
        *queries += 1;
        if *queries > budget {
            return Err(Error::Oracle(format!("query budget of {budget} exceeded")));
        }
        oracle(sys)
    };
    for d in (1..=n).rev() {
        let blocks: Vec<Matrix<Rational>> = qs
            .matrices()
            .iter()
            .map(|a| a.block(n - d, n - d, d, d))
            .collect();
        if !ask(&gadget_system(blocks.clone(), false)?, &mut queries)? {
            let feasible = ask(&gadget_system(blocks, true)?, &mut queries)?;
            return Ok(QfVerdict { feasible, queries });
        }
    }
    let feasible = qs.matrices().iter().all(|a| a.get(n - 1, n - 1).is_zero());
    Ok(QfVerdict { feasible, queries })
}

/// Oracle backed by [`feasibility_search`].
pub fn numeric_3qf_oracle(cfg: SearchConfig) -> impl FnMut(&TrilinearSystem) -> Result<bool> {
    move |sys| Ok(feasibility_search(sys, &cfg)?.is_found())
}

fn random_symmetric(n: usize, rng: &mut impl Rng, range: i64) -> Matrix<Rational> {
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = int(rng.random_range(-range..=range));
            a.set(i, j, v.clone());
            a.set(j, i, v);
        }
    }
    a
}

/// Square system with a planted root `x*`: random symmetric integer matrices
/// corrected by `A ← A - (x*ᵀAx* / ‖x*‖⁴) x*x*ᵀ`.
pub fn planted_quadratic_system(
    n: usize,
    rng: &mut impl Rng,
) -> Result<(QuadraticSystem, Vec<Rational>)> {
    if n == 0 {
        return Err(Error::InvalidInput("system size must be positive".into()));
    }
    let x: Vec<Rational> = loop {
        let x: Vec<Rational> = (0..n).map(|_| int(rng.random_range(-3..=3))).collect();
        if x.iter().any(|v| !v.is_zero()) {
            break x;
        }
    };
    let norm2 = x.iter().fold(int(0), |s, v| s + v * v);
    let xxt = Matrix::from_fn(n, n, |i, j| &x[i] * &x[j]);
    let mats = (0..n)
        .map(|_| {
            let a = random_symmetric(n, rng, 5);
            let q = a.bilinear(&x, &x)?;
            a.sub(&xxt.scale(&(q / (&norm2 * &norm2))))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((QuadraticSystem::new(n, mats)?, x))
}

/// Square system with no nonzero real root: the first matrix is
/// `MᵀM + I` for a random integer `M`.
pub fn definite_quadratic_system(n: usize, rng: &mut impl Rng) -> Result<QuadraticSystem> {
    if n == 0 {
        return Err(Error::InvalidInput("system size must be positive".into()));
    }
    let m = Matrix::from_fn(n, n, |_, _| int(rng.random_range(-3..=3)));
    let first = m.transpose().matmul(&m)?.add(&Matrix::identity(n))?;
    let mut mats = vec![first];
    mats.extend((1..n).map(|_| random_symmetric(n, rng, 5)));
    QuadraticSystem::new(n, mats)
}
