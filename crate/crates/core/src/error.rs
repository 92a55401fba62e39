use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("resolution must be a power of two, got {0}")]
    InvalidResolution(usize),

    #[error("time {0} is outside the unit interval [0, 1)")]
    TimeOutOfRange(f64),

    #[error("time {t} is not on the half-step grid of spacing {half_step}")]
    OffGrid { t: f64, half_step: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value produced while evaluating {what}")]
    NonFinite { what: &'static str },

    #[error("fixed-point iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("non-finite iterate at collocation point {index} (iteration {iteration})")]
    NonFiniteIterate { index: usize, iteration: usize },

    #[error("problem '{0}' has no exact solution")]
    MissingExactSolution(String),

    #[error("unknown built-in example {0}; valid ids are 1 and 2")]
    UnknownExample(u32),

    #[error("not enough successful trials: {effective} of {requested} (need at least 2)")]
    InsufficientTrials { effective: usize, requested: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0}")]
    Parse(#[from] crate::expr::ParseError),

    #[error("problem file: {0}")]
    ProblemFile(String),
}
