//! `hypermat` command line.
//!
//! Exit codes: 0 success / feasible / true, 1 infeasible / false / not found,
//! 2 usage or I/O error, 3 numerical non-convergence.

mod commands;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::search::SearchConfig;

pub use report::{sha256_hex, Format, RunReport, Status};

#[derive(Debug, Parser)]
#[command(
    name = "hypermat",
    version,
    about = "3-tensor numerics, reduction gadgets and rank tooling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: GlobalOpts,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Base seed for every randomized search
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Multistart restarts
    #[arg(long, global = true, default_value_t = 64)]
    pub restarts: usize,

    /// Residual tolerance
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,

    /// Iteration cap per restart
    #[arg(long, global = true, default_value_t = 500)]
    pub max_iters: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the generated tensor here (generator commands) or the report
    /// (everything else)
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

impl GlobalOpts {
    pub fn search_config(&self) -> SearchConfig {
        SearchConfig {
            seed: self.seed,
            restarts: self.restarts,
            max_iters: self.max_iters,
            tol: self.tol,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tensor files: summary, multilinear products, norms
    #[command(subcommand)]
    Tensor(TensorCmd),
    /// Spectral norm, best rank-1 approximation, eigenpairs
    #[command(subcommand)]
    Spectral(SpectralCmd),
    /// Reduction gadget constructors
    #[command(subcommand)]
    Gadget(GadgetCmd),
    /// Clique number by exhaustive search and by quadratic optimization
    #[command(subcommand)]
    Graph(GraphCmd),
    /// 2x2x2 hyperdeterminant and the associated bilinear system
    #[command(subcommand)]
    Hyperdet(HyperdetCmd),
    /// Rank bounds and the rank demonstrations
    #[command(subcommand)]
    Rank(RankCmd),
}

#[derive(Debug, Subcommand)]
pub enum TensorCmd {
    Info {
        file: PathBuf,
    },
    /// `A(X, Y, Z)`; an omitted matrix is the identity
    Mlmul {
        file: PathBuf,
        #[arg(long)]
        x: Option<PathBuf>,
        #[arg(long)]
        y: Option<PathBuf>,
        #[arg(long)]
        z: Option<PathBuf>,
    },
    /// Frobenius norm
    Norm {
        file: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    L2,
    L3,
}

#[derive(Debug, Subcommand)]
pub enum SpectralCmd {
    Norm {
        file: PathBuf,
    },
    Rank1 {
        file: PathBuf,
    },
    /// Eigenpairs of a symmetric tensor with n <= 4
    Eig {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::L2)]
        variant: VariantArg,
    },
}

#[derive(Debug, Subcommand)]
pub enum GadgetCmd {
    /// Quadratic system encoding 3-colorability (slices of the output tensor)
    ColorEncode {
        graph: PathBuf,
        /// One equation per vertex instead of one per edge
        #[arg(long)]
        aggregated: bool,
    },
    /// Padded, complexified square system; exit 0 iff 3-colorable
    Pipeline {
        graph: PathBuf,
        #[arg(long)]
        aggregated: bool,
        /// Also run the numeric feasibility search
        #[arg(long)]
        search: bool,
    },
    CliqueTensor {
        graph: PathBuf,
        #[arg(long)]
        ell: usize,
    },
    /// Tensor whose singular-vector system is solvable iff 3-colorable
    Tqf { graph: PathBuf },
    /// Decide a square quadratic system through the 3QF oracle
    #[command(name = "3qf-run")]
    QfRun {
        /// Tensor file whose mode-1 slices are the symmetric matrices
        file: Option<PathBuf>,
        /// Use a random system with a planted root of this size
        #[arg(long, conflicts_with_all = ["file", "definite"])]
        planted: Option<usize>,
        /// Use a random system with a definite member of this size
        #[arg(long, conflicts_with_all = ["file", "planted"])]
        definite: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GraphCmd {
    Omega { graph: PathBuf },
    Motzkin { graph: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum HyperdetCmd {
    Det {
        file: PathBuf,
    },
    /// Exit 0 iff a nontrivial solution exists
    Solve {
        file: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum RankCmd {
    Bounds {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_rank: usize,
        /// Bound on each component's norm product
        #[arg(long, default_value_t = 1e3)]
        cap: f64,
    },
    BorderDemo {
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 10, 100, 1000])]
        n: Vec<u64>,
        #[arg(long, default_value_t = 1e3)]
        cap: f64,
    },
    RationalDemo {
        /// Bound on the entries of the rational directions searched
        #[arg(long, default_value_t = 50)]
        height: i64,
    },
}

/// Parse `argv`, run the command, print the report and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                Status::Usage.code()
            } else {
                0
            };
        }
    };
    let start = Instant::now();
    let mut ctx = commands::Context::new(cli.global.clone());
    match commands::dispatch(&cli.command, &mut ctx) {
        Ok((mut report, status)) => {
            report.wall_time = start.elapsed();
            report.input_digest = ctx.digest();
            let text = report.render(cli.global.format);
            match (&cli.global.out, ctx.out_used()) {
                (Some(path), false) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return Status::Usage.code();
                    }
                }
                _ => print!("{text}"),
            }
            status.code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_status(&e).code()
        }
    }
}

fn exit_status(e: &Error) -> Status {
    match e {
        Error::Oracle(_) => Status::NotConverged,
        _ => Status::Usage,
    }
}
