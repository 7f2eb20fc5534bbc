//! CLI error type and its mapping to process exit codes.

use thiserror::Error;

/// Exit status when every check passed.
pub const EXIT_OK: i32 = 0;
/// Exit status when a verification suite found a violation.
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
/// Exit status for invalid configuration, arguments or I/O failures.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status when a computation was refused by a size cap.
pub const EXIT_SIZE_LIMIT: i32 = 3;

/// Failures of a CLI run.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] weakcumul::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(weakcumul::Error::SizeLimit { .. }) => EXIT_SIZE_LIMIT,
            _ => EXIT_CONFIG,
        }
    }
}

/// Result alias for CLI operations.
pub type CliResult<T> = std::result::Result<T, CliError>;
