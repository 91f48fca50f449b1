//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty distribution: {0}")]
    EmptyDistribution(String),

    #[error("zero valid records in trace")]
    ZeroValidRecords,

    #[error("unstable queue: offered load {offered:.4} >= 1 at {servers} servers")]
    UnstableQueue { servers: u64, offered: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("request exceeds context window: {total} tokens > {window}")]
    ContextOverflow { total: u64, window: u64 },

    #[error("empty text")]
    EmptyText,

    #[error("validation tolerance exceeded: {0}")]
    ToleranceExceeded(String),
}

impl Error {
    /// Process exit code for the CLI: 2 config, 3 infeasible, 4 tolerance, 1 other.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse(_) | Error::ZeroValidRecords => 2,
            Error::Infeasible(_) | Error::UnstableQueue { .. } => 3,
            Error::ToleranceExceeded(_) => 4,
            _ => 1,
        }
    }
}
