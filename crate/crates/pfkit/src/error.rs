//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A calibration target that no noise level can meet.
    #[error("infeasible target: {0}")]
    Infeasible(String),

    #[error("instance has {atoms} atoms on one side, above the cap of {cap}; use the 1D route or subsample")]
    CapExceeded { atoms: usize, cap: usize },

    /// Shift allocation that leaves a negative residual at step `step` (1-based).
    #[error("allocation infeasible at step {step}: residual shift {residual}")]
    InfeasibleAllocation { step: usize, residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
