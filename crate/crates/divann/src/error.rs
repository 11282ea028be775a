//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide error enum. Variants map onto the CLI exit-code contract:
/// usage/config problems, malformed data or files, and infeasible
/// diversity constraints are distinguishable by the caller.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller passed inconsistent or out-of-range arguments.
    #[error("usage error: {0}")]
    Usage(String),

    /// A file did not match its expected binary or text layout.
    #[error("format error at byte {offset}: {msg}")]
    Format { offset: u64, msg: String },

    /// The data itself rules the operation out (duplicate points, zero spread).
    #[error("degenerate data: {0}")]
    Degenerate(String),

    /// No result satisfying the diversity constraint exists.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn format(offset: u64, msg: impl Into<String>) -> Self {
        Error::Format {
            offset,
            msg: msg.into(),
        }
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }
}
