//! Cayley's 2x2x2 hyperdeterminant and the six bilinear equations it governs.
//!
//! Indices are 0-based here. [`bilinear_solve_222`] decides the system by a
//! finite case analysis in exact arithmetic and never evaluates the
//! hyperdeterminant, so the two can be checked against each other.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::error::{dims_err, Error, Result};
use crate::hypermatrix::{Matrix, Tensor3};
use crate::scalar::{exact_sqrt, int, Rational, Scalar};

fn check_222<T: Scalar>(a: &Tensor3<T>) -> Result<()> {
    if a.dims() != [2, 2, 2] {
        return Err(dims_err(format!(
            "expected a 2x2x2 tensor, got {:?}",
            a.dims()
        )));
    }
    Ok(())
}

fn det2<T: Scalar>(m: [[T; 2]; 2]) -> T {
    let [[a, b], [c, d]] = m;
    a * d - b * c
}

/// `¼[det(M0 + M1) - det(M0 - M1)]² - 4 det M0 det M1` with
/// `M_i = [[a_i00, a_i10], [a_i01, a_i11]]`.
pub fn det222<T: Scalar>(a: &Tensor3<T>) -> Result<T> {
    check_222(a)?;
    let m = |i: usize| {
        [
            [a.get(i, 0, 0).clone(), a.get(i, 1, 0).clone()],
            [a.get(i, 0, 1).clone(), a.get(i, 1, 1).clone()],
        ]
    };
    let (m0, m1) = (m(0), m(1));
    let zip = |f: &dyn Fn(T, T) -> T| -> [[T; 2]; 2] {
        let e = |r: usize, c: usize| f(m0[r][c].clone(), m1[r][c].clone());
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    };
    let plus = det2(zip(&|x, y| x + y));
    let minus = det2(zip(&|x, y| x - y));
    let diff = plus - minus;
    let quarter = T::from_ratio(1, 4);
    Ok(quarter * diff.clone() * diff - T::from_ratio(4, 1) * det2(m0) * det2(m1))
}

/// The three slice families of a cubical tensor: `A_k = [a_ijk]_{ij}`,
/// `B_j = [a_ijk]_{ik}`, `C_i = [a_ijk]_{jk}`.
pub fn slices<T: Scalar>(a: &Tensor3<T>) -> Result<[Vec<Matrix<T>>; 3]> {
    let [l, m, n] = a.dims();
    if l != m || m != n {
        return Err(Error::NotCubical(l, m, n));
    }
    Ok([
        (0..n).map(|k| a.slice_mode3(k)).collect(),
        (0..n).map(|j| a.slice_mode2(j)).collect(),
        (0..n).map(|i| a.slice_mode1(i)).collect(),
    ])
}

/// Element `a + b√d` of `ℚ(√d)`, where `d` is not a rational square
/// (or `b = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadExt {
    pub a: Rational,
    pub b: Rational,
    pub d: Rational,
}

impl QuadExt {
    pub fn rational(a: Rational, d: &Rational) -> Self {
        Self {
            a,
            b: int(0),
            d: d.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Value in `ℂ`; the square root of a negative `d` is taken as `i√|d|`.
    pub fn to_complex(&self) -> num_complex::Complex64 {
        let (a, b, d) = (self.a.to_f64(), self.b.to_f64(), self.d.to_f64());
        if d >= 0.0 {
            num_complex::Complex64::new(a + b * d.sqrt(), 0.0)
        } else {
            num_complex::Complex64::new(a, b * (-d).sqrt())
        }
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            let sign = if self.b.is_negative() { "-" } else { "+" };
            write!(f, "{} {sign} {}*sqrt({})", self.a, self.b.abs(), self.d)
        }
    }
}

impl Add for QuadExt {
    type Output = QuadExt;
    fn add(self, o: QuadExt) -> QuadExt {
        QuadExt {
            a: self.a + o.a,
            b: self.b + o.b,
            d: self.d,
        }
    }
}

impl Sub for QuadExt {
    type Output = QuadExt;
    fn sub(self, o: QuadExt) -> QuadExt {
        QuadExt {
            a: self.a - o.a,
            b: self.b - o.b,
            d: self.d,
        }
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl Mul for QuadExt {
    type Output = QuadExt;
    fn mul(self, o: QuadExt) -> QuadExt {
        let a = &self.a * &o.a + &self.b * &o.b * &self.d;
        let b = &self.a * &o.b + &self.b * &o.a;
        QuadExt { a, b, d: self.d }
    }
}

/// The six equations `A(x,y,I) = 0`, `A(x,I,z) = 0`, `A(I,y,z) = 0` of a
/// 2x2x2 tensor, stored as coefficient matrices per pair of unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearSystem222 {
    /// `xy[k][i][j] = a_ijk`
    pub xy: [[[Rational; 2]; 2]; 2],
    /// `xz[j][i][k] = a_ijk`
    pub xz: [[[Rational; 2]; 2]; 2],
    /// `yz[i][j][k] = a_ijk`
    pub yz: [[[Rational; 2]; 2]; 2],
}

impl BilinearSystem222 {
    pub fn from_tensor(a: &Tensor3<Rational>) -> Result<Self> {
        check_222(a)?;
        let g = |i: usize, j: usize, k: usize| a.get(i, j, k).clone();
        let build = |f: &dyn Fn(usize, usize, usize) -> Rational| -> [[[Rational; 2]; 2]; 2] {
            std::array::from_fn(|p| std::array::from_fn(|r| std::array::from_fn(|c| f(p, r, c))))
        };
        Ok(Self {
            xy: build(&|k, i, j| g(i, j, k)),
            xz: build(&|j, i, k| g(i, j, k)),
            yz: build(&|i, j, k| g(i, j, k)),
        })
    }

    /// All six residuals at `(x, y, z)` over `ℚ(√d)`.
    pub fn evaluate(&self, x: &[QuadExt; 2], y: &[QuadExt; 2], z: &[QuadExt; 2]) -> [QuadExt; 6] {
        let form = |m: &[[Rational; 2]; 2], p: &[QuadExt; 2], q: &[QuadExt; 2]| {
            let mut s = QuadExt::rational(int(0), &p[0].d);
            for r in 0..2 {
                for c in 0..2 {
                    s = s + QuadExt::rational(m[r][c].clone(), &p[0].d)
                        * p[r].clone()
                        * q[c].clone();
                }
            }
            s
        };
        [
            form(&self.xy[0], x, y),
            form(&self.xy[1], x, y),
            form(&self.xz[0], x, z),
            form(&self.xz[1], x, z),
            form(&self.yz[0], y, z),
            form(&self.yz[1], y, z),
        ]
    }
}

/// Nonzero `x, y, z` over `ℚ(√d)` solving all six equations.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness222 {
    pub x: [QuadExt; 2],
    pub y: [QuadExt; 2],
    pub z: [QuadExt; 2],
}

impl Witness222 {
    pub fn field(&self) -> &Rational {
        &self.x[0].d
    }
}

type Mat2 = [[QuadExt; 2]; 2];

/// Nonzero `y` with `yᵀ N = 0`, for `N` of rank one.
fn left_null(n: &Mat2) -> [QuadExt; 2] {
    if !(n[0][0].is_zero() && n[1][0].is_zero()) {
        [n[1][0].clone(), -n[0][0].clone()]
    } else {
        [n[1][1].clone(), -n[0][1].clone()]
    }
}

/// Nonzero `z` with `N z = 0`, for `N` of rank one.
fn right_null(n: &Mat2) -> [QuadExt; 2] {
    if !(n[0][0].is_zero() && n[0][1].is_zero()) {
        [n[0][1].clone(), -n[0][0].clone()]
    } else {
        [n[1][1].clone(), -n[1][0].clone()]
    }
}

/// Decide whether the six equations have a solution with `x, y, z` all
/// nonzero (over the algebraic closure) and return one.
///
/// `N(x) = A(x, I, I)` must be singular, so `x` is a root of the binary
/// quadratic `q(x) = det N(x)`. When the two slices `N(e_0), N(e_1)` are
/// dependent, some `N(x)` vanishes and a solution always exists. Otherwise
/// `N(x)` has rank one at each root, which pins `y` and `z`; if `q ≡ 0` the
/// matrices share a kernel or a cokernel and `x = e_0` suffices.
pub fn bilinear_solve_222(a: &Tensor3<Rational>) -> Result<Option<Witness222>> {
    let sys = BilinearSystem222::from_tensor(a)?;
    let s = |i: usize| -> [[Rational; 2]; 2] { sys.yz[i].clone() };
    let (s0, s1) = (s(0), s(1));
    let flat = |m: &[[Rational; 2]; 2]| {
        [
            m[0][0].clone(),
            m[0][1].clone(),
            m[1][0].clone(),
            m[1][1].clone(),
        ]
    };
    let (f0, f1) = (flat(&s0), flat(&s1));

    let dependent = (0..4).all(|p| (p..4).all(|q| &f0[p] * &f1[q] == &f0[q] * &f1[p]));
    let candidates: Vec<[QuadExt; 2]>;
    let d: Rational;
    if dependent {
        d = int(0);
        let q = |r: Rational| QuadExt::rational(r, &d);
        let x = match f0.iter().position(|v| !v.is_zero()) {
            None => [q(int(1)), q(int(0))],
            // S1 = c S0 with c = f1[p] / f0[p], so x = (-c, 1) gives N(x) = 0
            Some(p) => [q(-(&f1[p] / &f0[p])), q(int(1))],
        };
        let both_zero = f0.iter().chain(&f1).all(|v| v.is_zero());
        let sm = if f0.iter().any(|v| !v.is_zero()) {
            &s0
        } else {
            &s1
        };
        let y = [q(int(1)), q(int(0))];
        let w = [sm[0][0].clone(), sm[0][1].clone()];
        let z = if both_zero || w.iter().all(|v| v.is_zero()) {
            [q(int(1)), q(int(0))]
        } else {
            [q(-w[1].clone()), q(w[0].clone())]
        };
        let wit = Witness222 { x, y, z };
        return Ok(verify(&sys, wit));
    }

    let det = |m: &[[Rational; 2]; 2]| &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    let alpha = det(&s0);
    let gamma = det(&s1);
    let sum: [[Rational; 2]; 2] =
        std::array::from_fn(|r| std::array::from_fn(|c| &s0[r][c] + &s1[r][c]));
    let beta = det(&sum) - &alpha - &gamma;
    let disc = &beta * &beta - int(4) * &alpha * &gamma;

    if alpha.is_zero() && beta.is_zero() && gamma.is_zero() {
        d = int(0);
        let q = |r: i64| QuadExt::rational(int(r), &d);
        candidates = vec![[q(1), q(0)], [q(0), q(1)], [q(1), q(1)]];
    } else if alpha.is_zero() {
        // q = x1 (β x0 + γ x1)
        d = int(0);
        let q = |r: Rational| QuadExt::rational(r, &d);
        let mut c = vec![[q(int(1)), q(int(0))]];
        if !beta.is_zero() {
            c.push([q(-gamma.clone()), q(beta.clone())]);
        }
        candidates = c;
    } else {
        // x = (-β ± √disc, 2α)
        let root = match exact_sqrt(&disc) {
            Some(r) => {
                d = int(0);
                QuadExt::rational(r, &d)
            }
            None => {
                d = disc.clone();
                QuadExt {
                    a: int(0),
                    b: int(1),
                    d: d.clone(),
                }
            }
        };
        let q = |r: Rational| QuadExt::rational(r, &d);
        let base = q(-beta.clone());
        candidates = vec![
            [base.clone() + root.clone(), q(int(2) * &alpha)],
            [base - root, q(int(2) * &alpha)],
        ];
    }

    for x in candidates {
        let lift =
            |m: &[[Rational; 2]; 2], r: usize, c: usize| QuadExt::rational(m[r][c].clone(), &d);
        // N(x)[j][k] = x0 a_0jk + x1 a_1jk
        let n: Mat2 = std::array::from_fn(|r| {
            std::array::from_fn(|c| x[0].clone() * lift(&s0, r, c) + x[1].clone() * lift(&s1, r, c))
        });
        if n.iter().flatten().all(|v| v.is_zero()) {
            continue;
        }
        let wit = Witness222 {
            x: x.clone(),
            y: left_null(&n),
            z: right_null(&n),
        };
        if let Some(w) = verify(&sys, wit) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn verify(sys: &BilinearSystem222, w: Witness222) -> Option<Witness222> {
    let nonzero = |v: &[QuadExt; 2]| v.iter().any(|c| !c.is_zero());
    let ok = nonzero(&w.x)
        && nonzero(&w.y)
        && nonzero(&w.z)
        && sys.evaluate(&w.x, &w.y, &w.z).iter().all(QuadExt::is_zero);
    ok.then_some(w)
}
