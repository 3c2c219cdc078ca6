use thiserror::Error;

use crate::ordered_group::GroupElement;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A Hankel symbol was given coefficients outside the positive cone.
    #[error("symbol has coefficient {value:e} at {at} outside the positive cone")]
    SupportOutsideCone { at: GroupElement, value: f64 },

    #[error("order has no smallest positive element")]
    NoSmallestPositive,

    #[error("grid size {size} cannot represent degree {degree} without aliasing")]
    Aliasing { size: usize, degree: i64 },

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence { what: String, iterations: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
