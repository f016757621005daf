use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] rspcert_core::Error),
}

/// Process exit codes.
pub mod exit {
    pub const YES: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const PROBLEM: i32 = 2;
    pub const NO: i32 = 3;
    pub const MARGINAL: i32 = 4;
    pub const ORACLE_MISMATCH: i32 = 5;
    pub const BUDGET: i32 = 6;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use rspcert_core::Error as E;
        match self {
            CliError::Core(
                E::NotASolution { .. }
                | E::NotNonnegative { .. }
                | E::Infeasible
                | E::Unbounded
                | E::NoSolutionWithin(_),
            ) => exit::PROBLEM,
            CliError::Core(E::BudgetExceeded { .. }) => exit::BUDGET,
            _ => exit::USAGE,
        }
    }
}
