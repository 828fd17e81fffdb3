use thiserror::Error;

/// Errors raised by the optimizer, the benchmark problems and the chain verifier.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("unknown problem `{0}` (expected one of: ackley, sphere, rosenbrock, yang-forest, zakharov)")]
    UnknownProblem(String),

    #[error("group chain would have {states} states, above the cap of {cap}")]
    StateCap { states: u128, cap: usize },

    #[error("matrix is not row-stochastic: row {row} sums to {sum}")]
    NotStochastic { row: usize, sum: f64 },

    #[error("numerical domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
