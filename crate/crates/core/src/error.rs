use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is rank deficient (smallest Gram eigenvalue {smallest:e} vs largest {largest:e})")]
    RankDeficient { smallest: f64, largest: f64 },
    #[error("matrix is not symmetric: |G[{row},{col}] - G[{col},{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("column {0} is zero")]
    ZeroColumn(usize),
    #[error("column {index} has norm {norm} (expected 1)")]
    NotNormalized { index: usize, norm: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("index {index} out of range for {n} columns")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("duplicate index {0} in support")]
    DuplicateIndex(usize),
    #[error("no candidate atoms left outside the current support")]
    NoCandidates,
    #[error("epsilon search failed at prefix length {prefix} after {halvings} halvings")]
    EpsilonSearchFailed { prefix: usize, halvings: usize },
    #[error("spark {spark} does not exceed k + b = {required}")]
    SparkTooSmall { spark: usize, required: usize },
    #[error("enumeration of {count} subsets exceeds the limit of {limit}")]
    TooLarge { count: u128, limit: u128 },
    #[error("parameter outside the formula's domain: {0}")]
    OutOfDomain(String),
    #[error("no support extension of size <= {max_extra} reproduces y")]
    Infeasible { max_extra: usize },
    #[error("kernel dimension {0} is too large for a conclusive verdict (max 2)")]
    KernelTooLarge(usize),
    #[error("unknown claim `{0}`")]
    UnknownClaim(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
