use thiserror::Error;

use crate::mapexpr::{EvalError, ParseError};

/// Errors raised by the library. Command-line exit codes are derived from
/// these in [`crate::cli`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point {point} lies outside the domain (distance {distance:e}); retract it first")]
    DomainViolation { point: String, distance: f64 },

    #[error("non-finite value produced by {0}")]
    NonFinite(String),

    #[error("numerical blowup at iteration {n}: {cause}")]
    NumericalBlowup { n: usize, cause: String },

    #[error("unknown mapping `{name}`; valid names are {valid}")]
    NotFound { name: String, valid: String },

    #[error("unsupported dimension {0}; this check needs a one-dimensional interval")]
    UnsupportedDimension(usize),

    #[error("at sample {point}: {cause}")]
    AtSample { point: String, cause: Box<Error> },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
