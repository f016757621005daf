use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("non-finite entry at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index {index} out of range for {n} columns")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("duplicate index {0} in index set")]
    DuplicateIndex(usize),
    #[error("column {0} has (numerically) zero norm")]
    ZeroColumn(usize),
    #[error("mutual coherence needs at least two columns")]
    TooFewColumns,
    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),
    #[error("enumeration of {needed} subsets exceeds the budget of {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("simplex iteration limit of {0} pivots reached")]
    IterationLimit(usize),
    #[error("certificate unavailable: {0}")]
    CertificateUnavailable(String),
    #[error("x does not solve Ax = b (residual {residual:.3e})")]
    NotASolution { residual: f64 },
    #[error("entry {index} is negative ({value:e})")]
    NotNonnegative { index: usize, value: f64 },
    #[error("weight {index} is not positive ({value:e})")]
    NonpositiveWeight { index: usize, value: f64 },
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("no nonnegative solution with at most {0} nonzeros")]
    NoSolutionWithin(usize),
    #[error("order K = {k} must satisfy 1 <= K <= n = {n}")]
    InvalidOrder { k: usize, n: usize },
}
