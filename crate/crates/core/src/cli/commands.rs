use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use super::report::{num, sha256_hex, RunReport, Status};
use super::*;
use crate::error::{Error, Result};
use crate::gadgets::{
    clique_number, clique_tensor, clique_tensor_norm, clique_tensor_spectral_norm, color_encode,
    complexify_system, definite_quadratic_system, feasibility_search, lift_coloring,
    motzkin_straus_ascent, motzkin_straus_value, numeric_3qf_oracle, omega_from_singular_values,
    pipeline_witness, planted_quadratic_system, qf_via_3qf, threecolor_qf_pipeline,
    tqf_residual_complex, tqf_tensor, tqf_witness, EdgeForm, Graph, QuadraticSystem,
};
use crate::hyperdet::{bilinear_solve_222, det222};
use crate::hypermatrix::io::{
    parse_matrix, parse_tensor, tensor_to_string, tensor_to_string_exact, AnyMatrix, AnyTensor,
};
use crate::hypermatrix::{Matrix, Tensor3};
use crate::rank::{
    als_fit, border_rank_family, flattening_ranks, rank_bounds, rational_rank_demo, AlsOptions,
};
use crate::scalar::Rational;
use crate::search::{max_abs, restart_rng};
use crate::spectral::{best_rank1, find_eigenpairs_small, spectral_norm, Variant};

pub(super) struct Context {
    opts: GlobalOpts,
    inputs: Vec<Vec<u8>>,
    out_used: bool,
}

impl Context {
    pub(super) fn new(opts: GlobalOpts) -> Self {
        Self {
            opts,
            inputs: Vec::new(),
            out_used: false,
        }
    }

    pub(super) fn digest(&self) -> Option<String> {
        if self.inputs.is_empty() {
            return None;
        }
        let chunks: Vec<&[u8]> = self.inputs.iter().map(Vec::as_slice).collect();
        Some(sha256_hex(&chunks))
    }

    pub(super) fn out_used(&self) -> bool {
        self.out_used
    }

    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", path.display()),
            ))
        })?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| Error::InvalidInput(format!("{} is not valid UTF-8", path.display())))?;
        self.inputs.push(bytes);
        Ok(text)
    }

    fn tensor(&mut self, path: &Path) -> Result<AnyTensor> {
        parse_tensor(&self.read(path)?)
    }

    fn exact_tensor(&mut self, path: &Path) -> Result<Tensor3<Rational>> {
        match self.tensor(path)? {
            AnyTensor::Exact(t) => Ok(t),
            AnyTensor::Float(_) => Err(Error::InvalidInput(
                "this command needs exact (\"p/q\") entries".into(),
            )),
        }
    }

    fn graph(&mut self, path: &Path) -> Result<Graph> {
        Graph::parse(&self.read(path)?)
    }

    fn matrix(&mut self, path: Option<&PathBuf>) -> Result<Option<AnyMatrix>> {
        path.map(|p| parse_matrix(&self.read(p)?)).transpose()
    }

    /// Write a generated tensor to `--out`, or inline it in the report.
    fn emit(&mut self, report: &mut RunReport, tensor: &str) -> Result<()> {
        let tensor = tensor.trim_end();
        match &self.opts.out {
            Some(path) => {
                std::fs::write(path, format!("{tensor}\n"))?;
                self.out_used = true;
                report.push("output", path.display());
            }
            None => report.push("tensor", tensor),
        }
        Ok(())
    }
}

type Outcome = Result<(RunReport, Status)>;

pub(super) fn dispatch(cmd: &Command, ctx: &mut Context) -> Outcome {
    match cmd {
        Command::Tensor(c) => tensor_cmd(c, ctx),
        Command::Spectral(c) => spectral_cmd(c, ctx),
        Command::Gadget(c) => gadget_cmd(c, ctx),
        Command::Graph(c) => graph_cmd(c, ctx),
        Command::Hyperdet(c) => hyperdet_cmd(c, ctx),
        Command::Rank(c) => rank_cmd(c, ctx),
    }
}

fn dims_str(d: [usize; 3]) -> String {
    format!("{}x{}x{}", d[0], d[1], d[2])
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn numeric_rank(m: &Matrix<f64>) -> usize {
    let d = DMatrix::from_row_slice(m.rows(), m.cols(), m.data());
    let sv = d.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > 1e-10 * top.max(1e-300)).count()
}

fn tensor_cmd(cmd: &TensorCmd, ctx: &mut Context) -> Outcome {
    let seed = ctx.opts.seed;
    match cmd {
        TensorCmd::Info { file } => {
            let t = ctx.tensor(file)?;
            let mut r = RunReport::new("tensor info", seed);
            r.push("dims", dims_str(t.dims()));
            r.push("kind", format!("{:?}", t.kind()).to_lowercase());
            r.push("frobenius_norm", num(t.to_f64().frobenius_norm()));
            let (ranks, symmetric) = match &t {
                AnyTensor::Exact(a) => (flattening_ranks(a), a.is_symmetric().ok()),
                AnyTensor::Float(a) => (
                    [0, 1, 2].map(|m| numeric_rank(&a.unfold(m))),
                    a.is_symmetric().ok(),
                ),
            };
            r.push("flattening_ranks", join(&ranks));
            r.push(
                "cubical",
                t.dims()[0] == t.dims()[1] && t.dims()[1] == t.dims()[2],
            );
            if let Some(s) = symmetric {
                r.push("symmetric", s);
            }
            Ok((r, Status::Ok))
        }
        TensorCmd::Mlmul { file, x, y, z } => {
            let t = ctx.tensor(file)?;
            let mats = [
                ctx.matrix(x.as_ref())?,
                ctx.matrix(y.as_ref())?,
                ctx.matrix(z.as_ref())?,
            ];
            let all_exact = matches!(t, AnyTensor::Exact(_))
                && mats
                    .iter()
                    .flatten()
                    .all(|m| matches!(m, AnyMatrix::Exact(_)));
            let dims = t.dims();
            let out = if all_exact {
                let AnyTensor::Exact(a) = &t else {
                    unreachable!()
                };
                let pick = |i: usize| match &mats[i] {
                    Some(AnyMatrix::Exact(m)) => m.clone(),
                    _ => Matrix::identity(dims[i]),
                };
                AnyTensor::Exact(a.mlmul(&pick(0), &pick(1), &pick(2))?)
            } else {
                let pick = |i: usize| {
                    mats[i]
                        .as_ref()
                        .map(AnyMatrix::to_f64)
                        .unwrap_or_else(|| Matrix::identity(dims[i]))
                };
                AnyTensor::Float(t.to_f64().mlmul(&pick(0), &pick(1), &pick(2))?)
            };
            let mut r = RunReport::new("tensor mlmul", seed);
            r.push("dims", dims_str(out.dims()));
            ctx.emit(&mut r, &tensor_to_string(&out))?;
            Ok((r, Status::Ok))
        }
        TensorCmd::Norm { file } => {
            let t = ctx.tensor(file)?;
            let mut r = RunReport::new("tensor norm", seed);
            if let AnyTensor::Exact(a) = &t {
                r.push("frobenius_norm_sq", a.frobenius_norm_sq().to_string());
            }
            r.push("frobenius_norm", num(t.to_f64().frobenius_norm()));
            Ok((r, Status::Ok))
        }
    }
}

fn spectral_cmd(cmd: &SpectralCmd, ctx: &mut Context) -> Outcome {
    let cfg = ctx.opts.search_config();
    match cmd {
        SpectralCmd::Norm { file } => {
            let a = ctx.tensor(file)?.to_f64();
            let c = spectral_norm(&a, &cfg)?;
            let mut r = RunReport::new("spectral norm", cfg.seed);
            r.push("sigma", num(c.sigma));
            r.push("residual", num(c.residual));
            r.push("converged", c.converged);
            r.push("restarts", c.restarts_used);
            r.push("best_restart", c.best_restart);
            r.push("iterations", c.iterations);
            r.push("monotone_steps", c.monotonicity.steps);
            r.push("monotone_violations", c.monotonicity.violations);
            r.push_vec("u", &c.triple.u);
            r.push_vec("v", &c.triple.v);
            r.push_vec("w", &c.triple.w);
            Ok((
                r,
                if c.converged {
                    Status::Ok
                } else {
                    Status::NotConverged
                },
            ))
        }
        SpectralCmd::Rank1 { file } => {
            let a = ctx.tensor(file)?.to_f64();
            let b = best_rank1(&a, &cfg)?;
            let mut r = RunReport::new("spectral rank1", cfg.seed);
            r.push("sigma", num(b.sigma));
            r.push("error", num(b.error));
            r.push(
                "pythagoras_gap",
                num((b.error * b.error + b.sigma * b.sigma - a.frobenius_norm_sq()).abs()),
            );
            r.push("residual", num(b.certificate.residual));
            r.push("converged", b.certificate.converged);
            r.push_vec("u", &b.u);
            r.push_vec("v", &b.v);
            r.push_vec("w", &b.w);
            Ok((
                r,
                if b.certificate.converged {
                    Status::Ok
                } else {
                    Status::NotConverged
                },
            ))
        }
        SpectralCmd::Eig { file, variant } => {
            let a = ctx.tensor(file)?.to_f64();
            let v = match variant {
                VariantArg::L2 => Variant::L2,
                VariantArg::L3 => Variant::L3,
            };
            let pairs = find_eigenpairs_small(&a, v, &cfg)?;
            let mut r = RunReport::new("spectral eig", cfg.seed);
            r.push("variant", format!("{v:?}").to_lowercase());
            r.push("count", pairs.len());
            for (i, p) in pairs.iter().enumerate() {
                r.push(format!("lambda_{i}"), num(p.lambda));
                r.push_vec(format!("x_{i}"), &p.x);
            }
            Ok((
                r,
                if pairs.is_empty() {
                    Status::Negative
                } else {
                    Status::Ok
                },
            ))
        }
    }
}

fn edge_form(aggregated: bool) -> EdgeForm {
    if aggregated {
        EdgeForm::Aggregated
    } else {
        EdgeForm::PerEdge
    }
}

fn system_tensor(qs: &QuadraticSystem) -> Result<String> {
    Ok(tensor_to_string_exact(&qs.to_tensor()?))
}

fn gadget_cmd(cmd: &GadgetCmd, ctx: &mut Context) -> Outcome {
    let cfg = ctx.opts.search_config();
    match cmd {
        GadgetCmd::ColorEncode { graph, aggregated } => {
            let g = ctx.graph(graph)?;
            let ef = edge_form(*aggregated);
            let qs = color_encode(&g, ef);
            let mut r = RunReport::new("gadget color-encode", cfg.seed);
            r.push("equations", qs.len());
            r.push("variables", qs.dim());
            let colorable = match g.three_coloring() {
                Some(colors) => {
                    let z = lift_coloring(&g, &colors)?;
                    let res = qs
                        .evaluate_complex(&z)?
                        .iter()
                        .fold(0.0f64, |m, v| m.max(v.norm()));
                    r.push("coloring", join(&colors));
                    r.push("witness_residual", num(res));
                    true
                }
                None => false,
            };
            r.push("three_colorable", colorable);
            if !qs.is_empty() {
                ctx.emit(&mut r, &system_tensor(&qs)?)?;
            }
            Ok((
                r,
                if colorable {
                    Status::Ok
                } else {
                    Status::Negative
                },
            ))
        }
        GadgetCmd::Pipeline {
            graph,
            aggregated,
            search,
        } => {
            let g = ctx.graph(graph)?;
            let ef = edge_form(*aggregated);
            let qs = threecolor_qf_pipeline(&g, ef);
            let mut r = RunReport::new("gadget pipeline", cfg.seed);
            r.push("equations", qs.len());
            r.push("variables", qs.dim());
            let colorable = match g.three_coloring() {
                Some(colors) => {
                    let x = pipeline_witness(&g, ef, &lift_coloring(&g, &colors)?)?;
                    r.push("coloring", join(&colors));
                    r.push("witness_residual", num(max_abs(&qs.evaluate(&x)?)));
                    true
                }
                None => false,
            };
            r.push("three_colorable", colorable);
            if *search {
                let enc = complexify_system(&color_encode(&g, ef));
                let found = feasibility_search(&enc, &cfg)?;
                r.push("search_found", found.is_found());
                match &found {
                    crate::gadgets::Feasibility::Found(w) => {
                        r.push("search_residual", num(w.residual));
                        r.push("search_restart", w.restart);
                    }
                    crate::gadgets::Feasibility::NotFound {
                        best_residual,
                        restarts,
                    } => {
                        r.push("search_best_residual", num(*best_residual));
                        r.push("search_restarts", restarts);
                    }
                }
            }
            ctx.emit(&mut r, &system_tensor(&qs)?)?;
            Ok((
                r,
                if colorable {
                    Status::Ok
                } else {
                    Status::Negative
                },
            ))
        }
        GadgetCmd::CliqueTensor { graph, ell } => {
            let g = ctx.graph(graph)?;
            let t = clique_tensor(&g, *ell)?;
            let omega = clique_number(&g)?;
            let mut r = RunReport::new("gadget clique-tensor", cfg.seed);
            r.push("dims", dims_str(t.dims()));
            r.push("omega", omega);
            r.push(
                "expected_spectral_norm",
                num(clique_tensor_norm(omega, *ell)),
            );
            ctx.emit(&mut r, &tensor_to_string_exact(&t))?;
            Ok((r, Status::Ok))
        }
        GadgetCmd::Tqf { graph } => {
            let g = ctx.graph(graph)?;
            let t = tqf_tensor(&g);
            let mut r = RunReport::new("gadget tqf", cfg.seed);
            r.push("dims", dims_str(t.dims()));
            let colorable = match g.three_coloring() {
                Some(colors) => {
                    let w = tqf_witness(&g, &colors)?;
                    r.push("coloring", join(&colors));
                    r.push(
                        "witness_residual",
                        num(tqf_residual_complex(&t.to_f64(), &w.u, &w.v, &w.w)?),
                    );
                    true
                }
                None => false,
            };
            r.push("three_colorable", colorable);
            ctx.emit(&mut r, &tensor_to_string_exact(&t))?;
            Ok((
                r,
                if colorable {
                    Status::Ok
                } else {
                    Status::Negative
                },
            ))
        }
        GadgetCmd::QfRun {
            file,
            planted,
            definite,
        } => {
            let mut rng = restart_rng(cfg.seed, 0);
            let (qs, source) = match (file, planted, definite) {
                (Some(f), _, _) => (
                    QuadraticSystem::from_tensor(&ctx.exact_tensor(f)?)?,
                    "file".to_string(),
                ),
                (None, Some(n), _) => (
                    planted_quadratic_system(*n, &mut rng)?.0,
                    format!("planted:{n}"),
                ),
                (None, None, Some(n)) => (
                    definite_quadratic_system(*n, &mut rng)?,
                    format!("definite:{n}"),
                ),
                (None, None, None) => {
                    return Err(Error::InvalidInput(
                        "give a system file, --planted N or --definite N".into(),
                    ))
                }
            };
            let verdict = qf_via_3qf(&qs, numeric_3qf_oracle(cfg))?;
            let mut r = RunReport::new("gadget 3qf-run", cfg.seed);
            r.push("source", source);
            r.push("n", qs.dim());
            r.push("feasible", verdict.feasible);
            r.push("queries", verdict.queries);
            r.push("query_budget", qs.dim() + 2);
            Ok((
                r,
                if verdict.feasible {
                    Status::Ok
                } else {
                    Status::Negative
                },
            ))
        }
    }
}

fn graph_cmd(cmd: &GraphCmd, ctx: &mut Context) -> Outcome {
    let cfg = ctx.opts.search_config();
    match cmd {
        GraphCmd::Omega { graph } => {
            let g = ctx.graph(graph)?;
            let omega = clique_number(&g)?;
            let mut r = RunReport::new("graph omega", cfg.seed);
            r.push("omega", omega);
            let spectral = omega_from_singular_values(&g, &cfg)?;
            r.push("omega_spectral", spectral);
            if omega >= 1 {
                let c = clique_tensor_spectral_norm(&g, omega, &cfg)?;
                r.push("sigma_at_omega", num(c.sigma));
            }
            Ok((
                r,
                if spectral == omega {
                    Status::Ok
                } else {
                    Status::Negative
                },
            ))
        }
        GraphCmd::Motzkin { graph } => {
            let g = ctx.graph(graph)?;
            let value = motzkin_straus_value(&g)?;
            let omega = clique_number(&g)?;
            let mut r = RunReport::new("graph motzkin", cfg.seed);
            r.push("value", value.to_string());
            r.push("omega", omega);
            r.push("ascent_value", num(motzkin_straus_ascent(&g, &cfg)?));
            Ok((r, Status::Ok))
        }
    }
}

fn hyperdet_cmd(cmd: &HyperdetCmd, ctx: &mut Context) -> Outcome {
    let seed = ctx.opts.seed;
    match cmd {
        HyperdetCmd::Det { file } => {
            let mut r = RunReport::new("hyperdet det", seed);
            match ctx.tensor(file)? {
                AnyTensor::Exact(a) => r.push("det", det222(&a)?.to_string()),
                AnyTensor::Float(a) => r.push("det", num(det222(&a)?)),
            }
            Ok((r, Status::Ok))
        }
        HyperdetCmd::Solve { file } => {
            let a = ctx.exact_tensor(file)?;
            let det = det222(&a)?;
            let mut r = RunReport::new("hyperdet solve", seed);
            r.push("det", det.to_string());
            let status = match bilinear_solve_222(&a)? {
                Some(w) => {
                    r.push("found", true);
                    r.push("field_d", w.field().to_string());
                    r.push("x", format!("{},{}", w.x[0], w.x[1]));
                    r.push("y", format!("{},{}", w.y[0], w.y[1]));
                    r.push("z", format!("{},{}", w.z[0], w.z[1]));
                    Status::Ok
                }
                None => {
                    r.push("found", false);
                    Status::Negative
                }
            };
            Ok((r, status))
        }
    }
}

fn rank_cmd(cmd: &RankCmd, ctx: &mut Context) -> Outcome {
    let cfg = ctx.opts.search_config();
    match cmd {
        RankCmd::Bounds {
            file,
            max_rank,
            cap,
        } => {
            let a = ctx.exact_tensor(file)?;
            let opts = AlsOptions { cap: *cap };
            let b = rank_bounds(&a, *max_rank, &cfg, &opts)?;
            let mut r = RunReport::new("rank bounds", cfg.seed);
            r.push("flattening_ranks", join(&flattening_ranks(&a)));
            r.push("lower", b.lower);
            r.push(
                "upper",
                b.upper
                    .map_or_else(|| "none".to_string(), |u| u.to_string()),
            );
            r.push("certified", b.certified);
            Ok((
                r,
                if b.upper.is_some() {
                    Status::Ok
                } else {
                    Status::Negative
                },
            ))
        }
        RankCmd::BorderDemo { n, cap } => {
            let mut r = RunReport::new("rank border-demo", cfg.seed);
            let mut exact = true;
            for &k in n {
                let inst = border_rank_family(k)?;
                let scaled = inst.gap_sq()
                    * Rational::from_integer(k.into())
                    * Rational::from_integer(k.into());
                exact &= scaled == Rational::from_integer(1.into());
                r.push(format!("n={k} gap_sq"), inst.gap_sq().to_string());
                r.push(format!("n={k} n2_gap_sq"), scaled.to_string());
            }
            let limit = border_rank_family(1)?.limit;
            r.push("flattening_ranks", join(&flattening_ranks(&limit)));
            let opts = AlsOptions { cap: *cap };
            let af = limit.to_f64();
            for rank in 1..=3 {
                let fit = als_fit(&af, rank, &cfg, &opts)?;
                r.push(format!("als r={rank} residual"), num(fit.residual));
                r.push(
                    format!("als r={rank} max_component_norm"),
                    num(fit.max_component_norm),
                );
            }
            Ok((r, if exact { Status::Ok } else { Status::Negative }))
        }
        RankCmd::RationalDemo { height } => {
            let rep = rational_rank_demo(&cfg, *height)?;
            let mut r = RunReport::new("rank rational-demo", cfg.seed);
            r.push("entry_212", rep.tensor.get(1, 0, 1).to_string());
            r.push("real_identity_error", num(rep.real_identity_error));
            r.push("flattening_ranks", join(&rep.flattening_ranks));
            r.push("runs", rep.runs);
            r.push("solutions", rep.solutions.len());
            r.push(
                "max_cert_d1sq_minus_2c1sq",
                num(rep.max_certificate_residuals.0),
            );
            r.push(
                "max_cert_c1d2d3_minus_2",
                num(rep.max_certificate_residuals.1),
            );
            r.push(
                "pencil",
                rep.pencil
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
            );
            r.push("pencil_discriminant", rep.pencil_discriminant.to_string());
            r.push("pencil_rational_root", rep.pencil_has_rational_root);
            r.push("grid_height", rep.height);
            r.push("grid_points", rep.grid_points);
            r.push("grid_hits", rep.grid_hits);
            Ok((
                r,
                if rep.pencil_has_rational_root {
                    Status::Negative
                } else {
                    Status::Ok
                },
            ))
        }
    }
}
