use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown basis label '{0}'")]
    UnknownLabel(String),

    #[error("angle boundary condition violated: {0}")]
    BoundaryViolation(String),

    #[error("integration failed at t = {t:.6} us: {reason}")]
    Integration { t: f64, reason: String },

    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),

    #[error("unknown parameter '{key}' for scenario '{scenario}'; valid keys: {valid}")]
    UnknownParameter { scenario: String, key: String, valid: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
