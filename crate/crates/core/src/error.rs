use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A matrix that should be area preserving is not.
    #[error("inconsistent transfer matrix: determinant {det} deviates from 1")]
    InconsistentMatrix { det: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid cutoff {cutoff}: {reason}")]
    InvalidCutoff { cutoff: usize, reason: String },

    #[error("eigendecomposition failed on a {dim}x{dim} block (max |H_ij| = {norm:e})")]
    Numeric { dim: usize, norm: f64 },

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
