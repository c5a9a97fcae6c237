use thiserror::Error;

/// Errors produced by emdkit operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("a distribution needs at least 2 entries, got {0}")]
    LengthTooShort(usize),

    #[error("negative mass {value} at entry {index}")]
    NegativeMass { index: usize, value: String },

    #[error("non-finite mass at entry {index}")]
    NonFinite { index: usize },

    #[error("masses sum to {sum}, expected 1")]
    SumNotOne { sum: String },

    #[error("index {index} outside {lo}..={hi}")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },

    #[error("dimension mismatch: expected n={expected}, found n={found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("a tuple needs at least 2 distributions, got {0}")]
    TupleTooSmall(usize),

    #[error("empty input")]
    EmptyInput,

    #[error("site {value} outside 1..={max}")]
    Domain { value: usize, max: usize },

    #[error("work estimate {required} exceeds budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("d*n = {size} exceeds exact-path threshold {threshold}; use the quadrature path")]
    ThresholdExceeded { size: usize, threshold: usize },

    #[error("{nodes} quadrature nodes cannot integrate degree {degree} exactly (need {required})")]
    InsufficientNodes {
        nodes: usize,
        degree: usize,
        required: usize,
    },

    #[error("plan marginal for member {member} differs from its distribution at site {site}")]
    MarginalMismatch { member: usize, site: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse {0:?} as a number")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
