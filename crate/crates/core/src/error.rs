use thiserror::Error;

/// Errors raised by the numerical operations of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degree mismatch: expected degree {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("invalid multi-index: {0}")]
    InvalidMultiIndex(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported target: {0}")]
    UnsupportedTarget(String),

    #[error("non-finite integrand value at {at:?}")]
    NonFinite { at: Vec<f64> },

    #[error("sign violation at {at:?}: pullback density {density:e} is negative")]
    SignViolation { at: Vec<f64>, density: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
