use std::io;

use crossing_core::analytic::AnalyticError;
use crossing_core::montecarlo::McError;
use crossing_core::sequence::SequenceError;
use crossing_core::volume::VolumeError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{0}")]
    Uncovered(String),
    #[error("{0}")]
    Failure(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Uncovered(_) => 3,
            CliError::Failure(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<SequenceError> for CliError {
    fn from(e: SequenceError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<AnalyticError> for CliError {
    fn from(e: AnalyticError) -> Self {
        match e {
            AnalyticError::Uncovered { .. } => CliError::Uncovered(e.to_string()),
            AnalyticError::InvalidThreshold(_) | AnalyticError::CorollaryDomain { .. } => {
                CliError::Invalid(e.to_string())
            }
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::Diverging { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<VolumeError> for CliError {
    fn from(e: VolumeError) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}
