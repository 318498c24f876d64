//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violated a precondition (dimension mismatch, bad parameter, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A game failed construction-time validation.
    #[error("game construction rejected: {0}")]
    ConstructionRejected(String),

    /// An exhaustive enumeration would exceed the configured cap.
    #[error("joint strategy space has {count} profiles, exceeding the cap of {cap}")]
    EnumerationCapExceeded { count: u128, cap: u128 },

    /// A numerical procedure could not produce a usable result.
    #[error("diagnostic: {0}")]
    Diagnostic(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn construction_rejected(msg: impl Into<String>) -> Self {
        Error::ConstructionRejected(msg.into())
    }

    pub fn diagnostic(msg: impl Into<String>) -> Self {
        Error::Diagnostic(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
