use thiserror::Error;

/// Errors raised by the numerical and geometric routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid input: wrong dimension, out-of-range parameter, malformed spec.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A numerical routine failed to reach its tolerance or budget.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The operation is not defined for the given object (e.g. derivatives of a
    /// non-smooth gauge).
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// I/O or serialization failure.
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn num(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
