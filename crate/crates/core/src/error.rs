//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two operands live on different qubit counts.
    #[error("qubit count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// An operator that must be Hermitian is not.
    #[error("operator is not Hermitian: {0}")]
    NotHermitian(String),

    /// A caller-supplied argument violates a precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Malformed input data (operator files, configs).
    #[error("parse error: {0}")]
    Parse(String),

    /// A numerical invariant was breached (trace drift, singular system, …).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
