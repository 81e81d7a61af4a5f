//! Levenberg-Marquardt for square-sum residual systems, with optional
//! variable blocks pinned to the unit sphere.
//!
//! Steps on a sphere block are taken in its tangent space and retracted by
//! normalization, so homogeneous systems cannot creep toward the trivial zero.

use nalgebra::{DMatrix, DVector};

use crate::search::{max_abs, normalize};

pub trait ResidualSystem: Sync {
    fn num_vars(&self) -> usize;

    fn num_residuals(&self) -> usize;

    /// `(start, len)` ranges of variables constrained to unit norm.
    fn sphere_blocks(&self) -> Vec<(usize, usize)> {
        Vec::new()
    }

    fn residuals(&self, x: &[f64], out: &mut [f64]);

    /// Dense `num_residuals x num_vars` Jacobian.
    fn jacobian(&self, x: &[f64], jac: &mut DMatrix<f64>);
}

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iters: usize,
    /// Stop once the residual max-norm falls below this.
    pub tol: f64,
}

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub x: Vec<f64>,
    pub residual_max: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub fn project_blocks(x: &mut [f64], blocks: &[(usize, usize)]) {
    for &(s, len) in blocks {
        normalize(&mut x[s..s + len]);
    }
}

pub fn levenberg_marquardt<S: ResidualSystem + ?Sized>(
    sys: &S,
    x0: &[f64],
    opts: LmOptions,
) -> LmOutcome {
    let n = sys.num_vars();
    let m = sys.num_residuals();
    let blocks = sys.sphere_blocks();
    let mut x = x0.to_vec();
    project_blocks(&mut x, &blocks);

    let mut r = vec![0.0; m];
    sys.residuals(&x, &mut r);
    let mut cost = half_sq(&r);
    let mut jac = DMatrix::zeros(m, n);
    let mut mu = -1.0f64;
    let mut trial = vec![0.0; n];
    let mut r_trial = vec![0.0; m];
    let mut stalled = 0usize;
    let mut iterations = 0usize;

    while iterations < opts.max_iters {
        if max_abs(&r) < opts.tol {
            break;
        }
        iterations += 1;
        sys.jacobian(&x, &mut jac);
        for &(s, len) in &blocks {
            // J_b <- J_b (I - x_b x_bᵀ)
            for row in 0..m {
                let p: f64 = (0..len).map(|c| jac[(row, s + c)] * x[s + c]).sum();
                for c in 0..len {
                    jac[(row, s + c)] -= p * x[s + c];
                }
            }
        }
        let rv = DVector::from_column_slice(&r);
        let g = jac.tr_mul(&rv);
        if g.amax() < 1e-15 * (1.0 + rv.norm()) {
            break;
        }
        let h = jac.tr_mul(&jac);
        if mu < 0.0 {
            mu = 1e-3 * h.diagonal().max().max(1e-12);
        }
        let mut accepted = false;
        while mu < 1e14 {
            let mut lhs = h.clone();
            for d in 0..n {
                lhs[(d, d)] += mu;
            }
            let step = match lhs.cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => {
                    mu *= 4.0;
                    continue;
                }
            };
            for d in 0..n {
                trial[d] = x[d] + step[d];
            }
            project_blocks(&mut trial, &blocks);
            sys.residuals(&trial, &mut r_trial);
            let c = half_sq(&r_trial);
            if c.is_finite() && c < cost {
                let rel = (cost - c) / cost.max(f64::MIN_POSITIVE);
                stalled = if rel < 1e-10 { stalled + 1 } else { 0 };
                std::mem::swap(&mut x, &mut trial);
                std::mem::swap(&mut r, &mut r_trial);
                cost = c;
                mu = (mu / 3.0).max(1e-20);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        if !accepted || stalled >= 25 {
            break;
        }
    }
    let residual_max = max_abs(&r);
    LmOutcome {
        x,
        residual_max,
        converged: residual_max < opts.tol,
        iterations,
    }
}

fn half_sq(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|v| v * v).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// x² + y² - 2 = 0 and x - y = 0, unconstrained.
    struct Circle;

    impl ResidualSystem for Circle {
        fn num_vars(&self) -> usize {
            2
        }
        fn num_residuals(&self) -> usize {
            2
        }
        fn residuals(&self, x: &[f64], out: &mut [f64]) {
            out[0] = x[0] * x[0] + x[1] * x[1] - 2.0;
            out[1] = x[0] - x[1];
        }
        fn jacobian(&self, x: &[f64], jac: &mut DMatrix<f64>) {
            jac[(0, 0)] = 2.0 * x[0];
            jac[(0, 1)] = 2.0 * x[1];
            jac[(1, 0)] = 1.0;
            jac[(1, 1)] = -1.0;
        }
    }

    /// x₀ x₁ = 0 on the unit circle.
    struct Axis;

    impl ResidualSystem for Axis {
        fn num_vars(&self) -> usize {
            2
        }
        fn num_residuals(&self) -> usize {
            1
        }
        fn sphere_blocks(&self) -> Vec<(usize, usize)> {
            vec![(0, 2)]
        }
        fn residuals(&self, x: &[f64], out: &mut [f64]) {
            out[0] = x[0] * x[1];
        }
        fn jacobian(&self, x: &[f64], jac: &mut DMatrix<f64>) {
            jac[(0, 0)] = x[1];
            jac[(0, 1)] = x[0];
        }
    }

    #[test]
    fn solves_unconstrained_system() {
        let out = levenberg_marquardt(
            &Circle,
            &[3.0, 0.5],
            LmOptions {
                max_iters: 100,
                tol: 1e-13,
            },
        );
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-10 && (out.x[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn stays_on_sphere() {
        let out = levenberg_marquardt(
            &Axis,
            &[0.8, 0.7],
            LmOptions {
                max_iters: 100,
                tol: 1e-13,
            },
        );
        assert!(out.converged);
        assert!(((out.x[0].powi(2) + out.x[1].powi(2)) - 1.0).abs() < 1e-12);
    }
}
