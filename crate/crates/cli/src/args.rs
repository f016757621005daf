use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rspcert_core::order_k::Property;

/// Certify uniqueness of least-ℓ1 nonnegative solutions and related
/// recovery properties. Column indices are 0-based throughout.
#[derive(Debug, Clone, Parser)]
#[command(name = "rspcert", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Primal/dual feasibility tolerance.
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_feas: Option<f64>,
    /// Relative pivot threshold for rank decisions.
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_rank: Option<f64>,
    /// Required gap below 1 for off-support witness entries.
    #[arg(long, global = true, value_name = "TOL")]
    pub rsp_margin: Option<f64>,
    /// Duality gap tolerance.
    #[arg(long, global = true, value_name = "TOL")]
    pub gap_tol: Option<f64>,
    /// Entries at or below this magnitude count as zero.
    #[arg(long, global = true, value_name = "TOL")]
    pub zero_tol: Option<f64>,
    /// Maximum number of subsets any enumeration may visit.
    #[arg(long, global = true, env = "RSPCERT_BUDGET")]
    pub budget: Option<u64>,
    /// Seed for randomized commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Also write the JSON report to this path ("-" for stdout).
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Disable data-parallel enumeration.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Solve min ‖x‖₁ s.t. Ax = b, x ≥ 0 and certify uniqueness.
    SolveL1 { a: PathBuf, b: PathBuf },
    /// Certify that x is the unique least-ℓ1 (or weighted-ℓ1) solution.
    Certify {
        a: PathBuf,
        b: PathBuf,
        x: PathBuf,
        /// Positive column weights.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Check a recovery property of order K over all supports.
    OrderK {
        a: PathBuf,
        k: usize,
        #[arg(long, default_value = "rsp")]
        property: Property,
        /// Cross-check against the randomized recovery oracle.
        #[arg(long)]
        oracle: bool,
        /// Random vectors per support for the oracle.
        #[arg(long, default_value_t = 2)]
        trials: usize,
    },
    /// Classify the system and compare sparsest and least-ℓ1 solutions.
    Classify { a: PathBuf, b: PathBuf },
    /// Certify the sparsest optimal solution of min cᵀx s.t. Ax = b, x ≥ 0.
    LpSparse { a: PathBuf, b: PathBuf, c: PathBuf },
    /// Compare the order-K certifier with the oracle on random Gaussian matrices.
    RandomBatch {
        m: usize,
        n: usize,
        k: usize,
        count: usize,
        #[arg(long, default_value_t = 2)]
        trials: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SolveL1 { .. } => "solve-l1",
            Command::Certify { .. } => "certify",
            Command::OrderK { .. } => "order-k",
            Command::Classify { .. } => "classify",
            Command::LpSparse { .. } => "lp-sparse",
            Command::RandomBatch { .. } => "random-batch",
        }
    }
}
