//! Rank evidence: exact flattening ranks (lower bounds), alternating least
//! squares fits (upper-bound evidence), the border-rank family and a tensor
//! whose rank over ℚ exceeds its rank over ℝ.

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hypermatrix::{Matrix, Tensor3};
use crate::lm::{levenberg_marquardt, LmOptions, ResidualSystem};
use crate::scalar::{exact_sqrt, int, Rational};
use crate::search::{gaussian_vector, max_abs, restart_rng, run_restarts, SearchConfig};

/// Exact rank of a rational matrix: rows are cleared of denominators, then
/// fraction-free (Bareiss) elimination runs on integers.
pub fn matrix_rank(m: &Matrix<Rational>) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            let row: Vec<&Rational> = (0..cols).map(|j| m.get(i, j)).collect();
            let lcm = row.iter().fold(BigInt::one(), |l, r| l.lcm(r.denom()));
            row.iter().map(|r| r.numer() * (&lcm / r.denom())).collect()
        })
        .collect();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                let v = (&a[rank][c] * &a[r][k] - &a[r][c] * &a[rank][k]) / &prev;
                a[r][k] = v;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Exact ranks of the three unfoldings.
pub fn flattening_ranks(a: &Tensor3<Rational>) -> [usize; 3] {
    [0, 1, 2].map(|mode| matrix_rank(&a.unfold(mode)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankBounds {
    /// Largest flattening rank.
    pub lower: usize,
    /// Smallest rank whose fit reached the residual tolerance, if any did.
    pub upper: Option<usize>,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlsOptions {
    /// Bound on `‖x_α‖ ‖y_α‖ ‖z_α‖` for every component.
    pub cap: f64,
}

impl Default for AlsOptions {
    fn default() -> Self {
        Self { cap: 1e3 }
    }
}

#[derive(Debug, Clone)]
pub struct AlsFit {
    pub rank: usize,
    pub residual: f64,
    /// Column factors: `factors[mode][α]` is the mode vector of component α.
    pub factors: [Vec<Vec<f64>>; 3],
    pub sweeps: usize,
    pub residual_increases: usize,
    /// Largest component norm product at the end; equals the cap when it binds.
    pub max_component_norm: f64,
    pub restart: usize,
}

impl AlsFit {
    pub fn cap_active(&self, opts: &AlsOptions) -> bool {
        self.max_component_norm >= opts.cap * (1.0 - 1e-6)
    }

    pub fn reconstruct(&self, dims: [usize; 3]) -> Tensor3<f64> {
        let [x, y, z] = &self.factors;
        Tensor3::from_fn(dims, |i, j, k| {
            (0..self.rank).map(|r| x[r][i] * y[r][j] * z[r][k]).sum()
        })
    }
}

/// Factor matrices as `dim x r`, column α = component α.
type Factors = [DMatrix<f64>; 3];

fn model_residual(t: &Tensor3<f64>, f: &Factors) -> f64 {
    let [l, m, n] = t.dims();
    let r = f[0].ncols();
    let mut s = 0.0;
    for i in 0..l {
        for j in 0..m {
            for k in 0..n {
                let v: f64 = (0..r)
                    .map(|a| f[0][(i, a)] * f[1][(j, a)] * f[2][(k, a)])
                    .sum();
                let d = t.get(i, j, k) - v;
                s += d * d;
            }
        }
    }
    s.sqrt()
}

/// `M = T_(mode) (khatri-rao of the other two)` and the Gram matrix `G`.
fn normal_equations(t: &Tensor3<f64>, f: &Factors, mode: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let [l, m, n] = t.dims();
    let r = f[0].ncols();
    let (p, q) = match mode {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let mut rhs = DMatrix::zeros(t.dims()[mode], r);
    for i in 0..l {
        for j in 0..m {
            for k in 0..n {
                let v = *t.get(i, j, k);
                if v == 0.0 {
                    continue;
                }
                let idx = [i, j, k];
                for a in 0..r {
                    rhs[(idx[mode], a)] += v * f[p][(idx[p], a)] * f[q][(idx[q], a)];
                }
            }
        }
    }
    let gram = (f[p].transpose() * &f[p]).component_mul(&(f[q].transpose() * &f[q]));
    (rhs, gram)
}

fn column_bounds(f: &Factors, mode: usize, cap: f64) -> Vec<f64> {
    let r = f[0].ncols();
    (0..r)
        .map(|a| {
            let others: f64 = (0..3)
                .filter(|&d| d != mode)
                .map(|d| f[d].column(a).norm())
                .product();
            if others > 0.0 {
                cap / others
            } else {
                f64::INFINITY
            }
        })
        .collect()
}

fn project_columns(x: &mut DMatrix<f64>, bounds: &[f64]) {
    for (a, &b) in bounds.iter().enumerate() {
        let norm = x.column(a).norm();
        if norm > b {
            x.column_mut(a).scale_mut(b / norm);
        }
    }
}

/// Minimize over one factor with the others fixed, subject to the cap.
/// Never increases the residual.
fn update_block(t: &Tensor3<f64>, f: &mut Factors, mode: usize, cap: f64, current: f64) -> f64 {
    let (rhs, gram) = normal_equations(t, f, mode);
    let bounds = column_bounds(f, mode, cap);
    let candidate = gram.clone().pseudo_inverse(1e-13).ok().map(|gi| &rhs * gi);
    let within = |x: &DMatrix<f64>| (0..x.ncols()).all(|a| x.column(a).norm() <= bounds[a]);

    let candidate = match candidate {
        Some(x) if within(&x) && x.iter().all(|v| v.is_finite()) => x,
        _ => {
            // projected gradient on the convex per-column ball constraint
            let lip = SymmetricEigen::new(gram.clone())
                .eigenvalues
                .max()
                .max(1e-300);
            let mut x = f[mode].clone();
            for _ in 0..200 {
                let grad = &x * &gram - &rhs;
                let mut next = &x - grad / lip;
                project_columns(&mut next, &bounds);
                let change = (&next - &x).amax();
                x = next;
                if change < 1e-15 * (1.0 + x.amax()) {
                    break;
                }
            }
            x
        }
    };
    let old = std::mem::replace(&mut f[mode], candidate);
    let res = model_residual(t, f);
    if res <= current {
        res
    } else {
        f[mode] = old;
        current
    }
}

/// Equalize the three norms of each component; the model is unchanged.
fn rebalance(f: &mut Factors) {
    for a in 0..f[0].ncols() {
        let norms = [0, 1, 2].map(|d| f[d].column(a).norm());
        if norms.iter().any(|&v| v == 0.0) {
            continue;
        }
        let target = (norms[0] * norms[1] * norms[2]).cbrt();
        for d in 0..3 {
            f[d].column_mut(a).scale_mut(target / norms[d]);
        }
    }
}

fn max_component_norm(f: &Factors) -> f64 {
    (0..f[0].ncols())
        .map(|a| (0..3).map(|d| f[d].column(a).norm()).product::<f64>())
        .fold(0.0, f64::max)
}

fn run_als(
    t: &Tensor3<f64>,
    mut f: Factors,
    cfg: &SearchConfig,
    opts: &AlsOptions,
) -> (Factors, f64, usize, usize) {
    let mut res = model_residual(t, &f);
    let mut increases = 0;
    let mut sweeps = 0;
    let target = cfg.tol * t.frobenius_norm().max(1.0);
    let mut stretch = 1.0;
    while sweeps < cfg.max_iters && res > target {
        sweeps += 1;
        let before = res;
        let prev = f.clone();
        for mode in 0..3 {
            let next = update_block(t, &mut f, mode, opts.cap, res);
            if next > res {
                increases += 1;
            }
            res = next;
        }
        // extrapolate along the sweep direction; kept only if it helps
        let trial: Factors = std::array::from_fn(|d| &f[d] + (&f[d] - &prev[d]) * stretch);
        let trial_res = model_residual(t, &trial);
        if trial_res < res && max_component_norm(&trial) <= opts.cap {
            f = trial;
            res = trial_res;
            stretch *= 1.5;
        } else {
            stretch = (stretch / 2.0).max(1.0);
        }
        rebalance(&mut f);
        if before - res <= 1e-6 * before && sweeps > 10 {
            break;
        }
    }
    let (f, res) = polish(t, f, res, cfg.max_iters, target, opts.cap);
    (f, res, sweeps, increases)
}

fn flatten(f: &Factors) -> Vec<f64> {
    f.iter().flat_map(|m| m.iter().copied()).collect()
}

fn unflatten(x: &[f64], like: &Factors) -> Factors {
    let mut off = 0;
    std::array::from_fn(|d| {
        let (rows, cols) = like[d].shape();
        let m = DMatrix::from_column_slice(rows, cols, &x[off..off + rows * cols]);
        off += rows * cols;
        m
    })
}

/// Damped Gauss-Newton on all factors at once; a step is kept only if it
/// lowers the residual without breaking the cap. ALS crawls through the
/// near-degenerate valleys that border-rank tensors produce, this does not.
fn polish(
    t: &Tensor3<f64>,
    mut f: Factors,
    mut res: f64,
    iters: usize,
    target: f64,
    cap: f64,
) -> (Factors, f64) {
    let dims = t.dims();
    let r = f[0].ncols();
    let nvars: usize = dims.iter().sum::<usize>() * r;
    let mut mu = 1e-3;
    let mut stalled = 0;
    for _ in 0..iters {
        if res <= target || mu > 1e14 || stalled > 25 {
            break;
        }
        let mut jac = DMatrix::zeros(t.entries().len(), nvars);
        let mut resid = nalgebra::DVector::zeros(t.entries().len());
        let offs = [0, dims[0] * r, (dims[0] + dims[1]) * r];
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    let row = (i * dims[1] + j) * dims[2] + k;
                    let idx = [i, j, k];
                    let mut v = 0.0;
                    for a in 0..r {
                        let fac = [f[0][(i, a)], f[1][(j, a)], f[2][(k, a)]];
                        v += fac[0] * fac[1] * fac[2];
                        for d in 0..3 {
                            let others: f64 = (0..3).filter(|&q| q != d).map(|q| fac[q]).product();
                            jac[(row, offs[d] + a * dims[d] + idx[d])] = others;
                        }
                    }
                    resid[row] = v - t.get(i, j, k);
                }
            }
        }
        let jt = jac.transpose();
        let h = &jt * &jac;
        let g = &jt * &resid;
        let x = flatten(&f);
        loop {
            let mut damped = h.clone();
            for d in 0..nvars {
                damped[(d, d)] += mu * (1.0 + h[(d, d)]);
            }
            let Some(ch) = damped.cholesky() else {
                mu *= 10.0;
                if mu > 1e14 {
                    break;
                }
                continue;
            };
            let step = ch.solve(&(-&g));
            let cand: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let mut cf = unflatten(&cand, &f);
            rebalance(&mut cf);
            let cres = model_residual(t, &cf);
            if cres < res && max_component_norm(&cf) <= cap {
                stalled = if res - cres < 1e-10 * res {
                    stalled + 1
                } else {
                    0
                };
                f = cf;
                res = cres;
                mu = (mu / 3.0).max(1e-15);
                break;
            }
            mu *= 4.0;
            if mu > 1e14 {
                break;
            }
        }
    }
    (f, res)
}

fn random_factors(
    t: &Tensor3<f64>,
    r: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
    cap: f64,
) -> Factors {
    let dims = t.dims();
    let scale = (t.frobenius_norm() / r as f64)
        .min(cap * 0.5)
        .max(1e-12)
        .cbrt();
    std::array::from_fn(|d| {
        let mut m = DMatrix::from_column_slice(dims[d], r, &gaussian_vector(rng, dims[d] * r));
        for a in 0..r {
            let n = m.column(a).norm();
            if n > 0.0 {
                m.column_mut(a).scale_mut(scale / n);
            }
        }
        m
    })
}

fn to_fit(f: &Factors, residual: f64, sweeps: usize, increases: usize, restart: usize) -> AlsFit {
    let r = f[0].ncols();
    AlsFit {
        rank: r,
        residual,
        factors: [0, 1, 2].map(|d| {
            (0..r)
                .map(|a| f[d].column(a).iter().copied().collect())
                .collect()
        }),
        sweeps,
        residual_increases: increases,
        max_component_norm: max_component_norm(f),
        restart,
    }
}

fn best_of(runs: Vec<AlsFit>) -> AlsFit {
    let mut best: Option<AlsFit> = None;
    for fit in runs {
        if best.as_ref().is_none_or(|b| fit.residual < b.residual) {
            best = Some(fit);
        }
    }
    best.expect("at least one restart")
}

/// Best rank-`r` fit `Σ x_α⊗y_α⊗z_α` over seeded restarts, with every
/// component's norm product bounded by `opts.cap`.
pub fn als_fit(
    a: &Tensor3<f64>,
    r: usize,
    cfg: &SearchConfig,
    opts: &AlsOptions,
) -> Result<AlsFit> {
    cfg.validate()?;
    if r == 0 {
        return Err(Error::InvalidInput("rank must be at least 1".into()));
    }
    if !(opts.cap > 0.0) {
        return Err(Error::InvalidInput("factor cap must be positive".into()));
    }
    let runs = run_restarts(cfg.restarts, |idx| {
        let mut rng = restart_rng(cfg.seed, idx);
        let f = random_factors(a, r, &mut rng, opts.cap);
        let (f, res, sweeps, inc) = run_als(a, f, cfg, opts);
        to_fit(&f, res, sweeps, inc, idx)
    });
    Ok(best_of(runs))
}

/// Fits for ranks `1..=max_rank`. Each rank also tries the previous best fit
/// extended by a component with zero first factor, so residuals are
/// non-increasing in the rank.
pub fn als_sweep(
    a: &Tensor3<f64>,
    max_rank: usize,
    cfg: &SearchConfig,
    opts: &AlsOptions,
) -> Result<Vec<AlsFit>> {
    let mut fits: Vec<AlsFit> = Vec::new();
    for r in 1..=max_rank {
        let fresh = als_fit(a, r, cfg, opts)?;
        let fit = match fits.last() {
            None => fresh,
            Some(prev) => {
                let dims = a.dims();
                let mut rng = restart_rng(cfg.seed ^ 0x5eed, r);
                let f: Factors = std::array::from_fn(|d| {
                    let mut m = DMatrix::zeros(dims[d], r);
                    for (c, col) in prev.factors[d].iter().enumerate() {
                        m.column_mut(c).copy_from_slice(col);
                    }
                    if d > 0 {
                        let v = gaussian_vector(&mut rng, dims[d]);
                        m.column_mut(r - 1).copy_from_slice(&v);
                        let n = m.column(r - 1).norm();
                        m.column_mut(r - 1).scale_mut(1e-2 / n);
                    }
                    m
                });
                let (f, res, sweeps, inc) = run_als(a, f, cfg, opts);
                let warm = to_fit(&f, res, sweeps, inc, usize::MAX);
                if warm.residual < fresh.residual {
                    warm
                } else {
                    fresh
                }
            }
        };
        fits.push(fit);
    }
    Ok(fits)
}

/// Flattening lower bound plus the smallest rank up to `max_rank` whose fit
/// residual is below `cfg.tol · max(1, ‖A‖)`.
pub fn rank_bounds(
    a: &Tensor3<Rational>,
    max_rank: usize,
    cfg: &SearchConfig,
    opts: &AlsOptions,
) -> Result<RankBounds> {
    let lower = flattening_ranks(a).into_iter().max().unwrap_or(0);
    if a.is_zero() {
        return Ok(RankBounds {
            lower: 0,
            upper: Some(0),
            certified: true,
        });
    }
    let af = a.to_f64();
    let target = cfg.tol * af.frobenius_norm().max(1.0);
    let mut upper = None;
    if max_rank >= lower.max(1) {
        for fit in als_sweep(&af, max_rank, cfg, opts)? {
            if fit.rank >= lower && fit.residual <= target {
                upper = Some(fit.rank);
                break;
            }
        }
    }
    Ok(RankBounds {
        lower,
        upper,
        certified: upper == Some(lower),
    })
}

#[derive(Debug, Clone)]
pub struct BorderRankInstance {
    /// `x⊗x⊗y + x⊗y⊗x + y⊗x⊗x` with `x = e_1`, `y = e_2`.
    pub limit: Tensor3<Rational>,
    /// `x⊗x⊗(y - n x) + (x + y/n)⊗(x + y/n)⊗(n x)`.
    pub member: Tensor3<Rational>,
    pub n: u64,
}

impl BorderRankInstance {
    /// `‖A_n - A‖_F²`, exactly.
    pub fn gap_sq(&self) -> Rational {
        self.member
            .sub(&self.limit)
            .map(|d| d.frobenius_norm_sq())
            .unwrap_or_else(|_| int(0))
    }
}

/// The rank-3 tensor `A` and its rank-2 approximants `A_n`. Checks
/// `A_n - A = (1/n) y⊗y⊗x` exactly.
pub fn border_rank_family(n: u64) -> Result<BorderRankInstance> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "family parameter must be at least 1".into(),
        ));
    }
    let nr = Rational::from_integer(BigInt::from(n));
    let x = vec![int(1), int(0)];
    let y = vec![int(0), int(1)];
    let outer = |a: &[Rational], b: &[Rational], c: &[Rational]| Tensor3::outer_product(a, b, c);
    let limit = outer(&x, &x, &y)?
        .add(&outer(&x, &y, &x)?)?
        .add(&outer(&y, &x, &x)?)?;
    let lin = |p: &[Rational], s: Rational, q: &[Rational]| -> Vec<Rational> {
        p.iter().zip(q).map(|(a, b)| a + &s * b).collect()
    };
    let y_minus_nx = lin(&y, -nr.clone(), &x);
    let x_plus_y = lin(&x, nr.recip(), &y);
    let nx: Vec<Rational> = x.iter().map(|v| v * &nr).collect();
    let member = outer(&x, &x, &y_minus_nx)?.add(&outer(&x_plus_y, &x_plus_y, &nx)?)?;
    let expected = outer(&y, &y, &x)?.scale(&nr.recip());
    if member.sub(&limit)? != expected {
        return Err(Error::Oracle("border-rank identity failed".into()));
    }
    Ok(BorderRankInstance { limit, member, n })
}

/// `2x⊗x⊗x - 4y⊗y⊗x + 4y⊗x⊗y - 4x⊗y⊗y`, which equals
/// `z̄⊗z⊗z̄ + z⊗z̄⊗z` for `z = x + √2 y`.
pub fn rational_rank_tensor() -> Tensor3<Rational> {
    let mut a = Tensor3::zeros([2, 2, 2]);
    a.set(0, 0, 0, int(2));
    a.set(1, 1, 0, int(-4));
    a.set(1, 0, 1, int(4));
    a.set(0, 1, 1, int(-4));
    a
}

/// Right-hand sides of the eight equations for `u1⊗u2⊗u3 + v1⊗v2⊗v3`, in
/// the printed order `(111, 121, 211, 221, 112, 122, 212, 222)`. Entries 221
/// and 122 are `+4` there, the negatives of the tensor's entries.
pub const RATIONAL_SYSTEM_RHS: [(usize, usize, usize, f64); 8] = [
    (0, 0, 0, 2.0),
    (0, 1, 0, 0.0),
    (1, 0, 0, 0.0),
    (1, 1, 0, 4.0),
    (0, 0, 1, 0.0),
    (0, 1, 1, 4.0),
    (1, 0, 1, 4.0),
    (1, 1, 1, 0.0),
];

/// Unknowns `(a1,a2,a3,b1,b2,b3,c1,c2,c3,d1,d2,d3)` with `u_i = (a_i, b_i)`,
/// `v_i = (c_i, d_i)`.
struct RationalSystem;

fn term(x: &[f64], first: usize, idx: [usize; 3]) -> f64 {
    // first = 0 for u (a, b), 6 for v (c, d)
    (0..3).map(|m| x[first + 3 * idx[m] + m]).product()
}

impl ResidualSystem for RationalSystem {
    fn num_vars(&self) -> usize {
        12
    }

    fn num_residuals(&self) -> usize {
        8
    }

    fn residuals(&self, x: &[f64], out: &mut [f64]) {
        for (o, &(i, j, k, rhs)) in out.iter_mut().zip(&RATIONAL_SYSTEM_RHS) {
            *o = term(x, 0, [i, j, k]) + term(x, 6, [i, j, k]) - rhs;
        }
    }

    fn jacobian(&self, x: &[f64], jac: &mut DMatrix<f64>) {
        jac.fill(0.0);
        for (row, &(i, j, k, _)) in RATIONAL_SYSTEM_RHS.iter().enumerate() {
            let idx = [i, j, k];
            for first in [0, 6] {
                for m in 0..3 {
                    let others: f64 = (0..3)
                        .filter(|&q| q != m)
                        .map(|q| x[first + 3 * idx[q] + q])
                        .product();
                    jac[(row, first + 3 * idx[m] + m)] += others;
                }
            }
        }
    }
}

/// `(d1² - 2c1², c1 d2 d3 - 2)` at a solution vector.
pub fn rational_certificates(x: &[f64]) -> (f64, f64) {
    let (c1, d1, d2, d3) = (x[6], x[9], x[10], x[11]);
    (d1 * d1 - 2.0 * c1 * c1, c1 * d2 * d3 - 2.0)
}

#[derive(Debug, Clone)]
pub struct RationalRankReport {
    pub tensor: Tensor3<Rational>,
    /// Max entry error of `z̄⊗z⊗z̄ + z⊗z̄⊗z - A` in floating point.
    pub real_identity_error: f64,
    pub flattening_ranks: [usize; 3],
    pub runs: usize,
    pub solutions: Vec<Vec<f64>>,
    /// Largest `|d1² - 2c1²|` and `|c1 d2 d3 - 2|` over the solutions.
    pub max_certificate_residuals: (f64, f64),
    /// Coefficients `(α, β, γ)` of `det A(φ, I, I) = α φ1² + β φ1 φ2 + γ φ2²`.
    pub pencil: [Rational; 3],
    pub pencil_discriminant: Rational,
    /// Whether the pencil has a rational root; a rank-2 decomposition over ℚ
    /// would supply one.
    pub pencil_has_rational_root: bool,
    pub height: i64,
    pub grid_points: usize,
    pub grid_hits: usize,
}

/// Evidence that `rational_rank_tensor` has real rank 2 but rational rank
/// above 2.
///
/// If `A = u1⊗u2⊗u3 + v1⊗v2⊗v3` over ℚ with `u1, v1` independent, then
/// `φ ⊥ v1` is rational and `A(φ, I, I)` has rank at most one, so the binary
/// quadratic `det A(φ, I, I)` has a rational root. The report gives its
/// discriminant and also counts roots over all primitive `φ` with entries of
/// absolute value at most `height`.
pub fn rational_rank_demo(cfg: &SearchConfig, height: i64) -> Result<RationalRankReport> {
    cfg.validate()?;
    let tensor = rational_rank_tensor();
    let s2 = std::f64::consts::SQRT_2;
    let (z, zb) = ([1.0, s2], [1.0, -s2]);
    let real = Tensor3::from_fn([2, 2, 2], |i, j, k| {
        zb[i] * z[j] * zb[k] + z[i] * zb[j] * z[k]
    });
    let real_identity_error = max_abs(real.sub(&tensor.to_f64())?.entries());

    let opts = LmOptions {
        max_iters: cfg.max_iters,
        tol: 1e-14,
    };
    let found = run_restarts(cfg.restarts, |idx| {
        let mut rng = restart_rng(cfg.seed, idx);
        let x0 = gaussian_vector(&mut rng, 12);
        let out = levenberg_marquardt(&RationalSystem, &x0, opts);
        if !out.converged {
            return None;
        }
        let mut x = out.x;
        // equalize |u1|,|u2|,|u3| (and likewise for v) without changing the products
        for first in [0, 6] {
            let norms: Vec<f64> = (0..3)
                .map(|m| x[first + m].hypot(x[first + 3 + m]))
                .collect();
            let g = norms.iter().product::<f64>().cbrt();
            if norms.iter().all(|&n| n > 0.0) {
                for m in 0..3 {
                    x[first + m] *= g / norms[m];
                    x[first + 3 + m] *= g / norms[m];
                }
            }
        }
        let out = levenberg_marquardt(&RationalSystem, &x, opts);
        let mut r = [0.0; 8];
        RationalSystem.residuals(&out.x, &mut r);
        (max_abs(&r) < 1e-12).then_some(out.x)
    });
    let solutions: Vec<Vec<f64>> = found.into_iter().flatten().collect();
    let max_certificate_residuals = solutions.iter().fold((0.0f64, 0.0f64), |(p, q), x| {
        let (c1, c2) = rational_certificates(x);
        (p.max(c1.abs()), q.max(c2.abs()))
    });

    let s0 = tensor.slice_mode1(0);
    let s1 = tensor.slice_mode1(1);
    let det = |m: &Matrix<Rational>| m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
    let alpha = det(&s0);
    let gamma = det(&s1);
    let beta = det(&s0.add(&s1)?) - &alpha - &gamma;
    let pencil_discriminant = &beta * &beta - int(4) * &alpha * &gamma;
    let identically_zero = alpha.is_zero() && beta.is_zero() && gamma.is_zero();
    let pencil_has_rational_root =
        identically_zero || alpha.is_zero() || exact_sqrt(&pencil_discriminant).is_some();

    let mut grid_points = 0;
    let mut grid_hits = 0;
    for p in -height..=height {
        for q in -height..=height {
            if (p, q) == (0, 0) || p.gcd(&q) != 1 {
                continue;
            }
            grid_points += 1;
            let (p, q) = (int(p), int(q));
            if (&alpha * &p * &p + &beta * &p * &q + &gamma * &q * &q).is_zero() {
                grid_hits += 1;
            }
        }
    }

    Ok(RationalRankReport {
        flattening_ranks: flattening_ranks(&tensor),
        tensor,
        real_identity_error,
        runs: cfg.restarts,
        solutions,
        max_certificate_residuals,
        pencil: [alpha, beta, gamma],
        pencil_discriminant,
        pencil_has_rational_root,
        height,
        grid_points,
        grid_hits,
    })
}
