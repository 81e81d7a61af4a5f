//! Numeric feasibility oracle for homogeneous quadratic and trilinear systems.
//!
//! Minimizes the squared residuals over a product of unit spheres from seeded
//! random starts. A returned witness is checked; "not found" proves nothing.

use nalgebra::DMatrix;
use num_traits::Zero;

use super::quadratic::QuadraticSystem;
use super::trilinear::TrilinearSystem;
use crate::error::Result;
use crate::hypermatrix::Matrix;
use crate::lm::{levenberg_marquardt, LmOptions, ResidualSystem};
use crate::scalar::{Rational, Scalar};
use crate::search::{max_abs, random_unit, restart_rng, run_restarts, SearchConfig};

/// Restarts are run in batches of this size; the search stops after the first
/// batch that contains a witness.
const BATCH: usize = 32;

#[derive(Debug, Clone, Copy)]
pub enum SystemRef<'a> {
    Quadratic(&'a QuadraticSystem),
    Trilinear(&'a TrilinearSystem),
}

impl<'a> From<&'a QuadraticSystem> for SystemRef<'a> {
    fn from(s: &'a QuadraticSystem) -> Self {
        SystemRef::Quadratic(s)
    }
}

impl<'a> From<&'a TrilinearSystem> for SystemRef<'a> {
    fn from(s: &'a TrilinearSystem) -> Self {
        SystemRef::Trilinear(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// One unit vector per factor: `[x]` for quadratic systems, `[u, v, w]`
    /// for trilinear ones.
    pub blocks: Vec<Vec<f64>>,
    pub residual: f64,
    pub restart: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Found(Witness),
    NotFound { best_residual: f64, restarts: usize },
}

impl Feasibility {
    pub fn is_found(&self) -> bool {
        matches!(self, Feasibility::Found(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Feasibility::Found(w) => Some(w),
            Feasibility::NotFound { .. } => None,
        }
    }
}

/// `x_leftᵀ M x_right` over two variable blocks (possibly the same block).
struct BilinearEq {
    left: usize,
    right: usize,
    nz: Vec<(usize, usize, f64)>,
}

struct BilinearProblem {
    blocks: Vec<(usize, usize)>,
    eqs: Vec<BilinearEq>,
}

fn sparse(a: &Matrix<Rational>) -> Vec<(usize, usize, f64)> {
    let mut nz = Vec::new();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let v = a.get(i, j);
            if !v.is_zero() {
                nz.push((i, j, v.to_f64()));
            }
        }
    }
    nz
}

impl BilinearProblem {
    fn from_system(sys: SystemRef<'_>) -> Self {
        match sys {
            SystemRef::Quadratic(q) => Self {
                blocks: vec![(0, q.dim())],
                eqs: q
                    .matrices()
                    .iter()
                    .map(|a| BilinearEq {
                        left: 0,
                        right: 0,
                        nz: sparse(a),
                    })
                    .collect(),
            },
            SystemRef::Trilinear(t) => {
                let [l, m, _] = t.dims();
                let (u, v, w) = (0, l, l + m);
                let mut eqs = Vec::new();
                eqs.extend(t.a_slices().iter().map(|a| BilinearEq {
                    left: v,
                    right: w,
                    nz: sparse(a),
                }));
                eqs.extend(t.b_slices().iter().map(|b| BilinearEq {
                    left: u,
                    right: w,
                    nz: sparse(b),
                }));
                eqs.extend(t.c_slices().iter().map(|c| BilinearEq {
                    left: u,
                    right: v,
                    nz: sparse(c),
                }));
                let d = t.dims();
                Self {
                    blocks: vec![(u, d[0]), (v, d[1]), (w, d[2])],
                    eqs,
                }
            }
        }
    }
}

impl ResidualSystem for BilinearProblem {
    fn num_vars(&self) -> usize {
        self.blocks.iter().map(|b| b.1).sum()
    }

    fn num_residuals(&self) -> usize {
        self.eqs.len()
    }

    fn sphere_blocks(&self) -> Vec<(usize, usize)> {
        self.blocks.clone()
    }

    fn residuals(&self, x: &[f64], out: &mut [f64]) {
        for (o, eq) in out.iter_mut().zip(&self.eqs) {
            *o = eq
                .nz
                .iter()
                .map(|&(i, j, a)| a * x[eq.left + i] * x[eq.right + j])
                .sum();
        }
    }

    fn jacobian(&self, x: &[f64], jac: &mut DMatrix<f64>) {
        jac.fill(0.0);
        for (row, eq) in self.eqs.iter().enumerate() {
            for &(i, j, a) in &eq.nz {
                jac[(row, eq.left + i)] += a * x[eq.right + j];
                jac[(row, eq.right + j)] += a * x[eq.left + i];
            }
        }
    }
}

/// Search for a nonzero real solution with one unit vector per factor.
pub fn feasibility_search<'a>(
    system: impl Into<SystemRef<'a>>,
    cfg: &SearchConfig,
) -> Result<Feasibility> {
    cfg.validate()?;
    let problem = BilinearProblem::from_system(system.into());
    if problem.eqs.is_empty() {
        let blocks = problem.blocks.iter().map(|&(_, len)| unit(len)).collect();
        return Ok(Feasibility::Found(Witness {
            blocks,
            residual: 0.0,
            restart: 0,
        }));
    }
    let opts = LmOptions {
        max_iters: cfg.max_iters,
        tol: cfg.tol * 1e-2,
    };
    let mut best_residual = f64::INFINITY;
    let mut start = 0;
    while start < cfg.restarts {
        let count = BATCH.min(cfg.restarts - start);
        let outcomes = run_restarts(count, |k| {
            let idx = start + k;
            let mut rng = restart_rng(cfg.seed, idx);
            let x0: Vec<f64> = problem
                .blocks
                .iter()
                .flat_map(|&(_, len)| random_unit(&mut rng, len))
                .collect();
            levenberg_marquardt(&problem, &x0, opts)
        });
        for (k, out) in outcomes.into_iter().enumerate() {
            let mut r = vec![0.0; problem.eqs.len()];
            problem.residuals(&out.x, &mut r);
            let residual = max_abs(&r);
            if residual < cfg.tol {
                let blocks = problem
                    .blocks
                    .iter()
                    .map(|&(s, len)| out.x[s..s + len].to_vec())
                    .collect();
                return Ok(Feasibility::Found(Witness {
                    blocks,
                    residual,
                    restart: start + k,
                }));
            }
            best_residual = best_residual.min(residual);
        }
        start += count;
    }
    Ok(Feasibility::NotFound {
        best_residual,
        restarts: cfg.restarts,
    })
}

fn unit(len: usize) -> Vec<f64> {
    let mut e = vec![0.0; len];
    e[0] = 1.0;
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{color_encode, complexify_system, EdgeForm, Graph};

    #[test]
    fn finds_coloring_witness() {
        let sys = complexify_system(&color_encode(
            &Graph::complete(3).unwrap(),
            EdgeForm::PerEdge,
        ));
        let out = feasibility_search(&sys, &SearchConfig::default()).unwrap();
        let w = out.witness().expect("K3 is 3-colorable");
        assert!(w.residual < 1e-9);
        assert!(max_abs(&sys.evaluate(&w.blocks[0]).unwrap()) < 1e-9);
    }

    #[test]
    fn definite_form_has_no_witness() {
        let sys = QuadraticSystem::new(2, vec![Matrix::identity(2)]).unwrap();
        let out = feasibility_search(&sys, &SearchConfig::default().with_restarts(8)).unwrap();
        assert!(!out.is_found());
    }

    #[test]
    fn search_is_deterministic() {
        let sys = complexify_system(&color_encode(
            &Graph::path(3).unwrap(),
            EdgeForm::Aggregated,
        ));
        let cfg = SearchConfig::default().with_seed(9);
        assert_eq!(
            feasibility_search(&sys, &cfg).unwrap(),
            feasibility_search(&sys, &cfg).unwrap()
        );
    }
}
