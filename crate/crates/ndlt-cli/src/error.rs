//! CLI error type carrying the process exit code.
//!
//! Exit codes: 0 success, 2 parse failure, 3 payload corruption,
//! 4 numerical precondition failure, 64 usage error.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable file or malformed container manifest.
    #[error("parse error: {0}")]
    Parse(String),

    /// Manifest and payload disagree.
    #[error("corrupt container: {0}")]
    Corruption(String),

    /// A numerical precondition failed inside the library.
    #[error("{0}")]
    Numeric(#[from] ndlt_core::Error),

    /// Flags or container kinds that do not fit the subcommand.
    #[error("usage error: {0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Corruption(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Usage(_) => 64,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
