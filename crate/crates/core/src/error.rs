use thiserror::Error;

/// Errors raised by the compression library.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector, register or message had the wrong length.
    #[error("size mismatch: {0}")]
    Size(String),

    /// A caller-supplied parameter is out of its domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A configured resource cap (enumeration size, qubit count, message width) was exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),

    /// An input object failed validation (non-unitary, non-injective, non-idempotent, ...).
    #[error("validation failed: {0}")]
    Validation(String),

    /// An internal structural invariant was violated.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// A function was evaluated outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn size(msg: impl Into<String>) -> Self {
        Error::Size(msg.into())
    }
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
