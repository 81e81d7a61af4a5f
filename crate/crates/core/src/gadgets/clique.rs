use super::graph::Graph;
use crate::error::{Error, Result};
use crate::hypermatrix::Tensor3;
use crate::scalar::{int, rat, Rational};
use crate::search::{restart_rng, run_restarts, SearchConfig};
use crate::spectral::{spectral_norm, spectral_norm_with_starts, SpectralCertificate, Start};

/// Exact clique routines enumerate vertex subsets; this bounds their cost.
pub const MAX_EXACT_VERTICES: usize = 16;

fn check_exact_size(g: &Graph) -> Result<()> {
    if g.n() > MAX_EXACT_VERTICES {
        return Err(Error::SizeCap(format!(
            "exact clique search supports at most {MAX_EXACT_VERTICES} vertices, got {}",
            g.n()
        )));
    }
    Ok(())
}

/// Visit every clique (as a vertex mask) by extending with larger vertices only.
fn for_each_clique(g: &Graph, mut visit: impl FnMut(u64)) {
    fn grow(g: &Graph, clique: u64, candidates: u64, visit: &mut dyn FnMut(u64)) {
        visit(clique);
        let mut rest = candidates;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            grow(g, clique | 1 << v, rest & g.neighbor_mask(v), visit);
        }
    }
    let all = if g.n() == 64 {
        u64::MAX
    } else {
        (1u64 << g.n()) - 1
    };
    grow(g, 0, all, &mut visit);
}

/// A maximum clique, lowest vertex mask among ties.
pub fn max_clique(g: &Graph) -> Result<Vec<usize>> {
    check_exact_size(g)?;
    let mut best = 0u64;
    for mask in 1u64..(1 << g.n()) {
        if mask.count_ones() > best.count_ones() && is_clique(g, mask) {
            best = mask;
        }
    }
    Ok((0..g.n()).filter(|&v| best >> v & 1 == 1).collect())
}

fn is_clique(g: &Graph, mask: u64) -> bool {
    let mut rest = mask;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if rest & !g.neighbor_mask(v) != 0 {
            return false;
        }
    }
    true
}

/// Clique number by exhaustive subset search.
pub fn clique_number(g: &Graph) -> Result<usize> {
    Ok(max_clique(g)?.len())
}

/// `max` over the simplex of `Σ_{ij ∈ E} x_i x_j`, exactly. Candidate supports
/// are the cliques, each with uniform weights.
pub fn motzkin_straus_value(g: &Graph) -> Result<Rational> {
    check_exact_size(g)?;
    let mut best = int(0);
    for_each_clique(g, |mask| {
        let k = mask.count_ones() as i64;
        if k >= 2 {
            // k(k-1)/2 edges, each contributing 1/k²
            let value = rat(k - 1, 2 * k);
            if value > best {
                best = value;
            }
        }
    });
    Ok(best)
}

/// Edge form `Σ_{ij ∈ E} x_i x_j`.
pub fn edge_form_value(g: &Graph, x: &[f64]) -> f64 {
    g.edges().iter().map(|&(a, b)| x[a] * x[b]).sum()
}

/// Projected-gradient ascent for the same maximum over the simplex, from
/// seeded random starts. Used to cross-check [`motzkin_straus_value`].
pub fn motzkin_straus_ascent(g: &Graph, cfg: &SearchConfig) -> Result<f64> {
    cfg.validate()?;
    let n = g.n();
    let values = run_restarts(cfg.restarts, |idx| {
        let mut rng = restart_rng(cfg.seed, idx);
        let mut x: Vec<f64> = (0..n)
            .map(|_| rand::Rng::random::<f64>(&mut rng) + 1e-3)
            .collect();
        let s: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= s);
        let mut value = edge_form_value(g, &x);
        let mut step = 0.5;
        for _ in 0..cfg.max_iters {
            let grad: Vec<f64> = (0..n).map(|i| g.neighbors(i).map(|j| x[j]).sum()).collect();
            let mut improved = false;
            while step > 1e-14 {
                let trial: Vec<f64> = x.iter().zip(&grad).map(|(a, d)| a + step * d).collect();
                let trial = project_to_simplex(&trial);
                let v = edge_form_value(g, &trial);
                if v > value {
                    x = trial;
                    value = v;
                    improved = true;
                    step *= 2.0;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        value
    });
    Ok(values.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(y: &[f64]) -> Vec<f64> {
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &s) in sorted.iter().enumerate() {
        cum += s;
        let t = (cum - 1.0) / (k + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|v| (v - theta).max(0.0)).collect()
}

/// `n x n x (ℓ + 2m)` tensor whose spectral norm is 1 exactly when `ℓ = ω`.
/// Third-mode slices: `ℓ` copies of `I/ℓ`, then `E_k = (E_ij + E_ji)/2` for
/// each edge in lexicographic order, then the same `m` edge slices again.
pub fn clique_tensor(g: &Graph, ell: usize) -> Result<Tensor3<Rational>> {
    if ell == 0 {
        return Err(Error::InvalidInput("clique tensor needs ℓ >= 1".into()));
    }
    let n = g.n();
    let m = g.m();
    let mut t = Tensor3::zeros([n, n, ell + 2 * m]);
    let diag = rat(1, ell as i64);
    for k in 0..ell {
        for i in 0..n {
            t.set(i, i, k, diag.clone());
        }
    }
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        for k in [ell + e, ell + m + e] {
            t.set(a, b, k, rat(1, 2));
            t.set(b, a, k, rat(1, 2));
        }
    }
    Ok(t)
}

/// `√(1 + (ω - ℓ)/(ℓω))`, the spectral norm of [`clique_tensor`].
pub fn clique_tensor_norm(omega: usize, ell: usize) -> f64 {
    let (w, l) = (omega as f64, ell as f64);
    (1.0 + (w - l) / (l * w)).sqrt()
}

/// Spectral norm of the clique tensor with a maximum-clique warm start added
/// in front of the random restarts.
pub fn clique_tensor_spectral_norm(
    g: &Graph,
    ell: usize,
    cfg: &SearchConfig,
) -> Result<SpectralCertificate> {
    let t = clique_tensor(g, ell)?.to_f64();
    let clique = max_clique(g)?;
    let start = clique_warm_start(g, &clique, ell);
    spectral_norm_with_starts(&t, cfg, &[start])
}

/// `u = v` the normalized clique indicator, `w` the contraction `A(u, v, I)`.
pub fn clique_warm_start(g: &Graph, clique: &[usize], ell: usize) -> Start {
    let n = g.n();
    let m = g.m();
    let scale = 1.0 / (clique.len() as f64).sqrt();
    let mut u = vec![0.0; n];
    for &v in clique {
        u[v] = scale;
    }
    let mut w = vec![0.0; ell + 2 * m];
    let uu: f64 = u.iter().map(|x| x * x).sum();
    w[..ell].iter_mut().for_each(|x| *x = uu / ell as f64);
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        w[ell + e] = u[a] * u[b];
        w[ell + m + e] = u[a] * u[b];
    }
    [u.clone(), u, w]
}

/// Largest `ℓ` in `1..=n` whose clique tensor has spectral norm 1 (within
/// `1e-6`), using random restarts only.
pub fn omega_from_singular_values(g: &Graph, cfg: &SearchConfig) -> Result<usize> {
    if g.n() > 10 {
        return Err(Error::SizeCap(format!(
            "singular-value clique search supports n <= 10, got {}",
            g.n()
        )));
    }
    let mut omega = None;
    for ell in 1..=g.n() {
        let cert = spectral_norm(&clique_tensor(g, ell)?.to_f64(), cfg)?;
        if (cert.sigma - 1.0).abs() < 1e-6 {
            omega = Some(ell);
        }
    }
    omega.ok_or_else(|| {
        Error::Oracle("no ℓ with unit spectral norm found; increase restarts".into())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clique_numbers() {
        assert_eq!(clique_number(&Graph::complete(3).unwrap()).unwrap(), 3);
        assert_eq!(clique_number(&Graph::empty(4).unwrap()).unwrap(), 1);
        assert_eq!(clique_number(&Graph::cycle(5).unwrap()).unwrap(), 2);
        assert_eq!(clique_number(&Graph::petersen().unwrap()).unwrap(), 2);
        assert_eq!(clique_number(&Graph::wheel(4).unwrap()).unwrap(), 3);
        assert!(matches!(
            clique_number(&Graph::empty(17).unwrap()),
            Err(Error::SizeCap(_))
        ));
    }

    #[test]
    fn motzkin_straus_examples() {
        assert_eq!(
            motzkin_straus_value(&Graph::complete(3).unwrap()).unwrap(),
            rat(1, 3)
        );
        assert_eq!(
            motzkin_straus_value(&Graph::empty(3).unwrap()).unwrap(),
            int(0)
        );
        assert_eq!(
            motzkin_straus_value(&Graph::cycle(5).unwrap()).unwrap(),
            rat(1, 4)
        );
    }

    #[test]
    fn ascent_agrees_with_exact_value() {
        let cfg = SearchConfig::default()
            .with_restarts(16)
            .with_max_iters(2000);
        for g in [
            Graph::cycle(5).unwrap(),
            Graph::wheel(5).unwrap(),
            Graph::complete(4).unwrap(),
        ] {
            let exact = crate::Scalar::to_f64(&motzkin_straus_value(&g).unwrap());
            let approx = motzkin_straus_ascent(&g, &cfg).unwrap();
            assert!((exact - approx).abs() < 1e-9, "{exact} vs {approx}");
        }
    }

    #[test]
    fn simplex_projection() {
        let p = project_to_simplex(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
        assert_eq!(project_to_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
    }

    #[test]
    fn clique_tensor_shape_and_norms() {
        let k3 = Graph::complete(3).unwrap();
        let t = clique_tensor(&k3, 3).unwrap();
        assert_eq!(t.dims(), [3, 3, 9]);
        assert_eq!(t.slice_mode3(3), t.slice_mode3(6));
        let cfg = SearchConfig::default();
        for (ell, expected) in [
            (2, (7.0f64 / 6.0).sqrt()),
            (3, 1.0),
            (4, (11.0f64 / 12.0).sqrt()),
        ] {
            let c = clique_tensor_spectral_norm(&k3, ell, &cfg).unwrap();
            assert!((c.sigma - expected).abs() < 1e-6, "ℓ={ell}: {}", c.sigma);
            assert!((clique_tensor_norm(3, ell) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn omega_via_singular_values() {
        let cfg = SearchConfig::default();
        assert_eq!(
            omega_from_singular_values(&Graph::complete(3).unwrap(), &cfg).unwrap(),
            3
        );
        assert_eq!(
            omega_from_singular_values(&Graph::cycle(5).unwrap(), &cfg).unwrap(),
            2
        );
        assert_eq!(
            omega_from_singular_values(&Graph::complete(5).unwrap(), &cfg).unwrap(),
            5
        );
    }
}
