use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A denominator vanished before the numerator did.
    #[error("pole: {0}")]
    Pole(String),

    #[error("capacity exceeded: {what} needs {needed} entries, limit is {limit}")]
    Capacity { what: String, needed: String, limit: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("linear algebra: {0}")]
    LinearAlgebra(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn capacity(what: impl Into<String>, needed: impl ToString, limit: u64) -> Self {
        Error::Capacity { what: what.into(), needed: needed.to_string(), limit }
    }
}
