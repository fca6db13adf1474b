//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error(
        "adjoint reconstruction rejected: relative amplified quadrature error \
         {amplified:.3e} exceeds {limit:.1e} at inner truncation {k_inner}"
    )]
    AdjointGuard {
        k_inner: usize,
        amplified: f64,
        limit: f64,
    },

    #[error("operator-side data unavailable: {0}")]
    MissingOperator(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

pub type Result<T> = std::result::Result<T, FockError>;
