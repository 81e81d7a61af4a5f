//! Eigenpairs, singular triples and the spectral norm of 3-tensors.
//!
//! The spectral norm is found by alternating maximization: with two unit
//! vectors fixed, the best third one is the normalized contraction. Each such
//! update can only raise `A(u, v, w)`, so the objective sequence of a run is
//! non-decreasing; runs record that sequence so tests can check it.

use nalgebra::DMatrix;

use crate::error::{dims_err, Error, Result};
use crate::hypermatrix::{Slot, Tensor3};
use crate::lm::{levenberg_marquardt, LmOptions, ResidualSystem};
use crate::scalar::Scalar;
use crate::search::{
    canonical_sign, max_abs, normalize, random_unit, restart_rng, run_restarts, SearchConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Unit-sphere normalization; right-hand sides are linear.
    L2,
    /// Cube-sum normalization; right-hand sides are squared componentwise.
    L3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<T = f64> {
    pub lambda: T,
    pub x: Vec<T>,
    pub variant: Variant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularTriple<T = f64> {
    /// `A(u, v, w)` at the reported vectors; may be negative after sign
    /// canonicalization.
    pub sigma: T,
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub w: Vec<T>,
    pub variant: Variant,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MonotonicityLog {
    pub steps: usize,
    pub violations: usize,
}

impl MonotonicityLog {
    fn merge(&mut self, other: MonotonicityLog) {
        self.steps += other.steps;
        self.violations += other.violations;
    }
}

#[derive(Debug, Clone)]
pub struct SpectralCertificate {
    /// `|A(u, v, w)|`.
    pub sigma: f64,
    pub triple: SingularTriple,
    /// Max-norm of the three stationarity residuals at the triple.
    pub residual: f64,
    pub restarts_used: usize,
    pub best_restart: usize,
    pub converged: bool,
    pub iterations: usize,
    pub monotonicity: MonotonicityLog,
}

#[derive(Debug, Clone)]
pub struct Rank1Approximation {
    pub sigma: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    /// `‖A - σ u⊗v⊗w‖_F` using the signed coefficient.
    pub error: f64,
    pub certificate: SpectralCertificate,
}

pub type Start = [Vec<f64>; 3];

/// `A(x, x, I) - λx` (l2) or `A(x, x, I) - λ(x_k²)_k` (l3).
pub fn eig_residual<T: Scalar>(a: &Tensor3<T>, pair: &EigenPair<T>) -> Result<Vec<T>> {
    if !a.is_cubical() {
        let [l, m, n] = a.dims();
        return Err(Error::NotCubical(l, m, n));
    }
    if pair.x.iter().all(|x| x.is_zero()) {
        return Err(Error::InvalidInput("eigenvector must be nonzero".into()));
    }
    let x = pair.x.as_slice();
    let g = a.contract_to_vector([Slot::Vector(x), Slot::Vector(x), Slot::Identity])?;
    Ok(g.into_iter()
        .zip(x)
        .map(|(gk, xk)| gk - pair.lambda.clone() * rhs(pair.variant, xk))
        .collect())
}

fn rhs<T: Scalar>(variant: Variant, x: &T) -> T {
    match variant {
        Variant::L2 => x.clone(),
        Variant::L3 => x.clone() * x.clone(),
    }
}

/// Residuals `(A(u,v,I) - σw, A(I,v,w) - σu, A(u,I,w) - σv)`, with squares on
/// the right-hand side for l3.
pub fn singular_residual<T: Scalar>(
    a: &Tensor3<T>,
    t: &SingularTriple<T>,
) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    let (u, v, w) = (t.u.as_slice(), t.v.as_slice(), t.w.as_slice());
    let sub = |g: Vec<T>, y: &[T]| -> Vec<T> {
        g.into_iter()
            .zip(y)
            .map(|(gk, yk)| gk - t.sigma.clone() * rhs(t.variant, yk))
            .collect()
    };
    let rw = sub(
        a.contract_to_vector([Slot::Vector(u), Slot::Vector(v), Slot::Identity])?,
        w,
    );
    let ru = sub(
        a.contract_to_vector([Slot::Identity, Slot::Vector(v), Slot::Vector(w)])?,
        u,
    );
    let rv = sub(
        a.contract_to_vector([Slot::Vector(u), Slot::Identity, Slot::Vector(w)])?,
        v,
    );
    Ok((rw, ru, rv))
}

pub fn singular_residual_max(a: &Tensor3<f64>, t: &SingularTriple) -> Result<f64> {
    let (r1, r2, r3) = singular_residual(a, t)?;
    Ok(max_abs(&r1).max(max_abs(&r2)).max(max_abs(&r3)))
}

/// The cubic form `A(x, x, x)`.
pub fn cubic_form(a: &Tensor3<f64>, x: &[f64]) -> Result<f64> {
    a.trilinear_form(x, x, x)
}

/// Gradient of the cubic form of a symmetric tensor, `3 A(x, x, I)`.
pub fn cubic_form_gradient(a: &Tensor3<f64>, x: &[f64]) -> Result<Vec<f64>> {
    let g = a.contract_to_vector([Slot::Vector(x), Slot::Vector(x), Slot::Identity])?;
    Ok(g.into_iter().map(|v| 3.0 * v).collect())
}

/// Nonzero entries as `(i, j, k, a_ijk)`.
#[derive(Debug, Clone)]
pub(crate) struct Sparse3 {
    dims: [usize; 3],
    nz: Vec<(usize, usize, usize, f64)>,
}

impl Sparse3 {
    pub(crate) fn new(a: &Tensor3<f64>) -> Self {
        let [_, m, n] = a.dims();
        let nz = a
            .entries()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(p, &v)| (p / (m * n), (p / n) % m, p % n, v))
            .collect();
        Self { dims: a.dims(), nz }
    }

    /// Contract all modes but `free`, using `x` and `y` for the remaining two
    /// in mode order.
    pub(crate) fn contract(&self, free: usize, x: &[f64], y: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.resize(self.dims[free], 0.0);
        for &(i, j, k, a) in &self.nz {
            match free {
                0 => out[i] += a * x[j] * y[k],
                1 => out[j] += a * x[i] * y[k],
                _ => out[k] += a * x[i] * y[j],
            }
        }
    }

    pub(crate) fn form(&self, u: &[f64], v: &[f64], w: &[f64]) -> f64 {
        self.nz
            .iter()
            .map(|&(i, j, k, a)| a * u[i] * v[j] * w[k])
            .sum()
    }
}

struct Run {
    u: Vec<f64>,
    v: Vec<f64>,
    w: Vec<f64>,
    sigma: f64,
    iterations: usize,
    log: MonotonicityLog,
}

fn alternating_run(sp: &Sparse3, mut start: Start, max_iters: usize, tol: f64) -> Run {
    for s in start.iter_mut() {
        if normalize(s) == 0.0 {
            s[0] = 1.0;
        }
    }
    let [mut u, mut v, mut w] = start;
    let mut obj = sp.form(&u, &v, &w);
    let mut log = MonotonicityLog::default();
    let mut g = Vec::new();
    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        for mode in 0..3 {
            let (target, x, y) = match mode {
                0 => (&mut u, &v, &w),
                1 => (&mut v, &u, &w),
                _ => (&mut w, &u, &v),
            };
            sp.contract(mode, x, y, &mut g);
            let norm = normalize(&mut g);
            let new = if norm > 0.0 {
                target.copy_from_slice(&g);
                norm
            } else {
                obj
            };
            log.steps += 1;
            if new < obj - 4.0 * f64::EPSILON * obj.abs().max(1.0) {
                log.violations += 1;
            }
            obj = new;
        }
        // w was just set from A(u,v,I), so only the u and v equations can fail.
        let sigma = sp.form(&u, &v, &w);
        sp.contract(0, &v, &w, &mut g);
        let r_u = g
            .iter()
            .zip(&u)
            .fold(0.0f64, |m, (a, b)| m.max((a - sigma * b).abs()));
        sp.contract(1, &u, &w, &mut g);
        let r_v = g
            .iter()
            .zip(&v)
            .fold(0.0f64, |m, (a, b)| m.max((a - sigma * b).abs()));
        if r_u.max(r_v) < tol {
            break;
        }
    }
    let sigma = sp.form(&u, &v, &w);
    Run {
        u,
        v,
        w,
        sigma,
        iterations,
        log,
    }
}

/// Largest `|A(u, v, w)|` over unit vectors found from `cfg.restarts` seeded
/// random starts.
pub fn spectral_norm(a: &Tensor3<f64>, cfg: &SearchConfig) -> Result<SpectralCertificate> {
    spectral_norm_with_starts(a, cfg, &[])
}

/// As [`spectral_norm`], with the first restarts replaced by the given starts.
/// The run count is `max(cfg.restarts, starts.len())`.
pub fn spectral_norm_with_starts(
    a: &Tensor3<f64>,
    cfg: &SearchConfig,
    starts: &[Start],
) -> Result<SpectralCertificate> {
    cfg.validate()?;
    if a.entries().iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("tensor has non-finite entries".into()));
    }
    if a.is_zero() {
        return Err(Error::ZeroTensor);
    }
    let dims = a.dims();
    for s in starts {
        if (0..3).any(|d| s[d].len() != dims[d]) {
            return Err(dims_err("warm start does not match tensor dimensions"));
        }
    }
    let sp = Sparse3::new(a);
    let total = cfg.restarts.max(starts.len());
    let runs = run_restarts(total, |idx| {
        let start = match starts.get(idx) {
            Some(s) => s.clone(),
            None => {
                let mut rng = restart_rng(cfg.seed, idx);
                [
                    random_unit(&mut rng, dims[0]),
                    random_unit(&mut rng, dims[1]),
                    random_unit(&mut rng, dims[2]),
                ]
            }
        };
        alternating_run(&sp, start, cfg.max_iters, cfg.tol)
    });

    let mut monotonicity = MonotonicityLog::default();
    let mut best = 0;
    for (idx, r) in runs.iter().enumerate() {
        monotonicity.merge(r.log);
        if r.sigma.abs() > runs[best].sigma.abs() {
            best = idx;
        }
    }
    let run = &runs[best];
    let (mut u, mut v, mut w) = (run.u.clone(), run.v.clone(), run.w.clone());
    let sign = canonical_sign(&mut u) * canonical_sign(&mut v) * canonical_sign(&mut w);
    let triple = SingularTriple {
        sigma: sign * run.sigma,
        u,
        v,
        w,
        variant: Variant::L2,
    };
    let residual = singular_residual_max(a, &triple)?;
    Ok(SpectralCertificate {
        sigma: run.sigma.abs(),
        triple,
        residual,
        restarts_used: total,
        best_restart: best,
        converged: residual < cfg.tol,
        iterations: run.iterations,
        monotonicity,
    })
}

/// Best rank-1 approximation `σ u⊗v⊗w` and its Frobenius error.
pub fn best_rank1(a: &Tensor3<f64>, cfg: &SearchConfig) -> Result<Rank1Approximation> {
    let cert = spectral_norm(a, cfg)?;
    let t = &cert.triple;
    let [l, m, n] = a.dims();
    let mut err = 0.0;
    for i in 0..l {
        for j in 0..m {
            for k in 0..n {
                let d = a.get(i, j, k) - t.sigma * t.u[i] * t.v[j] * t.w[k];
                err += d * d;
            }
        }
    }
    Ok(Rank1Approximation {
        sigma: cert.sigma,
        u: t.u.clone(),
        v: t.v.clone(),
        w: t.w.clone(),
        error: err.sqrt(),
        certificate: cert,
    })
}

/// Eigenvalue equations on the unit sphere; variables are `(x, λ)`.
struct EigSystem<'a> {
    a: &'a Tensor3<f64>,
    variant: Variant,
}

impl ResidualSystem for EigSystem<'_> {
    fn num_vars(&self) -> usize {
        self.a.dims()[0] + 1
    }

    fn num_residuals(&self) -> usize {
        self.a.dims()[0]
    }

    fn sphere_blocks(&self) -> Vec<(usize, usize)> {
        vec![(0, self.a.dims()[0])]
    }

    fn residuals(&self, z: &[f64], out: &mut [f64]) {
        let n = self.a.dims()[0];
        let (x, lambda) = (&z[..n], z[n]);
        for (k, o) in out.iter_mut().enumerate() {
            let mut g = 0.0;
            for i in 0..n {
                for j in 0..n {
                    g += self.a.get(i, j, k) * x[i] * x[j];
                }
            }
            *o = g - lambda * rhs(self.variant, &x[k]);
        }
    }

    fn jacobian(&self, z: &[f64], jac: &mut DMatrix<f64>) {
        let n = self.a.dims()[0];
        let (x, lambda) = (&z[..n], z[n]);
        for k in 0..n {
            for p in 0..n {
                let mut d = 0.0;
                for j in 0..n {
                    d += self.a.get(p, j, k) * x[j] + self.a.get(j, p, k) * x[j];
                }
                if p == k {
                    d -= match self.variant {
                        Variant::L2 => lambda,
                        Variant::L3 => 2.0 * lambda * x[k],
                    };
                }
                jac[(k, p)] = d;
            }
            jac[(k, n)] = -rhs(self.variant, &x[k]);
        }
    }
}

/// Real eigenpairs of a small cubical tensor from seeded Newton-type starts.
/// Vectors are unit with first nonzero component positive; the list is not
/// guaranteed complete.
pub fn find_eigenpairs_small(
    a: &Tensor3<f64>,
    variant: Variant,
    cfg: &SearchConfig,
) -> Result<Vec<EigenPair>> {
    cfg.validate()?;
    let [l, m, n] = a.dims();
    if l != m || m != n {
        return Err(Error::NotCubical(l, m, n));
    }
    if n > 4 {
        return Err(Error::SizeCap(format!(
            "eigenpair search supports n <= 4, got {n}"
        )));
    }
    let sys = EigSystem { a, variant };
    let opts = LmOptions {
        max_iters: cfg.max_iters,
        tol: cfg.tol * 1e-2,
    };
    let found = run_restarts(cfg.restarts, |idx| {
        let mut rng = restart_rng(cfg.seed, idx);
        let x = random_unit(&mut rng, n);
        let g = a
            .contract_to_vector([Slot::Vector(&x), Slot::Vector(&x), Slot::Identity])
            .ok()?;
        let d: Vec<f64> = x.iter().map(|xk| rhs(variant, xk)).collect();
        let dd: f64 = d.iter().map(|t| t * t).sum();
        let lambda0 = if dd > 0.0 {
            g.iter().zip(&d).map(|(p, q)| p * q).sum::<f64>() / dd
        } else {
            0.0
        };
        let mut z = x;
        z.push(lambda0);
        let out = levenberg_marquardt(&sys, &z, opts);
        let mut x = out.x[..n].to_vec();
        let mut lambda = out.x[n];
        let sign = canonical_sign(&mut x);
        if variant == Variant::L2 {
            lambda *= sign;
        }
        let pair = EigenPair { lambda, x, variant };
        let r = eig_residual(a, &pair).ok()?;
        (max_abs(&r) < cfg.tol).then_some(pair)
    });

    let mut pairs: Vec<EigenPair> = Vec::new();
    for p in found.into_iter().flatten() {
        let dup = pairs.iter().any(|q| {
            (q.lambda - p.lambda).abs() < 1e-6
                && q.x.iter().zip(&p.x).all(|(s, t)| (s - t).abs() < 1e-6)
        });
        if !dup {
            pairs.push(p);
        }
    }
    pairs.sort_by(|p, q| {
        q.lambda.total_cmp(&p.lambda).then_with(|| {
            p.x.iter()
                .zip(&q.x)
                .map(|(s, t)| s.total_cmp(t))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    Ok(pairs)
}
