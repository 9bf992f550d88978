use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid function spec: {0}")]
    Spec(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The requested closed form is only valid in a parameter regime that
    /// the arguments do not satisfy.
    #[error("regime error: {0}")]
    Regime(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("unsupported algorithm: {0}")]
    UnsupportedAlgorithm(String),

    #[error("unit mismatch: {0}")]
    Units(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Domain(msg.into()))
}
