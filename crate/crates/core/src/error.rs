use thiserror::Error;

/// Errors raised by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point must have at least one coordinate")]
    EmptyPoint,
    #[error("coordinate {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),
    #[error("duplicate point at position {0}")]
    DuplicatePoint(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("weight vector is not in the probability simplex: {0}")]
    NotInSimplex(String),
    #[error("point is not a member of the set")]
    NotInSet,
    #[error("no grid point satisfies the round-{round} floor constraints")]
    Infeasible { round: usize },
    #[error("grid resolution {resolution} gives slack {slack:e}, too coarse for tolerance {eps:e}")]
    BudgetInsufficient { resolution: usize, slack: f64, eps: f64 },
    #[error("grid would hold {size} points, above the cap of {cap}")]
    GridTooLarge { size: u128, cap: u128 },
    #[error("operation requires a finite set representation")]
    NotFinite,
    #[error("exponential loss overflows: log value {0}")]
    Overflow(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
