//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates its documented range or relation.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A grid-of-beams layout cannot be synthesized.
    #[error("invalid grid-of-beams layout: {0}")]
    Layout(String),

    /// Matrix / feature dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    /// Input data is malformed or insufficient for the requested operation.
    #[error("invalid data: {0}")]
    Data(String),

    /// A persisted model or dataset file does not match the expected schema.
    #[error("model/schema error: {0}")]
    Model(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
}
