//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input exceeds a hard enumeration or size cap.
    #[error("size limit exceeded: {what} = {value} (limit {limit})")]
    SizeLimit {
        what: &'static str,
        value: u128,
        limit: u128,
    },
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A hypothesis required by a bound or theorem does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A denominator vanished or changed sign.
    #[error("singularity: {0}")]
    Singularity(String),
    /// A configuration value is invalid.
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn size(what: &'static str, value: impl Into<u128>, limit: impl Into<u128>) -> Self {
        Error::SizeLimit {
            what,
            value: value.into(),
            limit: limit.into(),
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
