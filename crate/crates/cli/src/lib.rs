//! Command-line front end for polyext: expression parsing, experiment
//! orchestration, deterministic reports and a persistent cache.

pub mod cache;
pub mod commands;
pub mod pool;
pub mod report;
pub mod sweep;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Engine(#[from] polyext::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Process exit code: 2 for a failed invariant, 1 for any other error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(polyext::Error::Verification(_)) => 2,
            _ => 1,
        }
    }
}
