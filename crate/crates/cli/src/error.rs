use std::path::PathBuf;

use rmt_gaps::{EngineError, MonteCarloError, SpecError};
use thiserror::Error;

/// Every failure the front end can report, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: unknown family, missing or inconsistent parameters,
    /// violated constraints, malformed config.
    #[error("{0}")]
    Validation(String),
    /// A numerical routine failed on valid input.
    #[error("{0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) | CliError::Io { .. } => 2,
        }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        match e {
            SpecError::PartitionMismatch { .. } | SpecError::Numerical(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Spec(s) => s.into(),
            EngineError::Query(_) => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<MonteCarloError> for CliError {
    fn from(e: MonteCarloError) -> Self {
        match e {
            MonteCarloError::Spec(s) => s.into(),
            MonteCarloError::NotDirectlyConstructible(_) | MonteCarloError::Config(_) | MonteCarloError::InvalidQuery(_) => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
