use alloc::string::String;
use alloc::vec::Vec;

/// Failure classes shared by every operation in the crate.
///
/// The variants map one-to-one onto the error classes a caller needs to
/// distinguish (the CLI turns them into exit codes).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A vector or matrix had the wrong length or shape.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    /// A value lies outside the domain an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),
    /// An invalid or infeasible configuration was requested.
    #[error("configuration error: {0}")]
    Config(String),
    /// The request would exceed an exhaustive-search guard.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    /// A pipeline could not make progress. `partial_labels` holds the
    /// clustering reached before it stopped.
    #[error("degenerate input: {reason}")]
    Degenerate { reason: String, partial_labels: Vec<usize> },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension { expected, actual })
    }
}
