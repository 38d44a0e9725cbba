use std::path::PathBuf;

use serde::Serialize;
use swapval_core::{LifecycleError, MarketError, SchedulerError, ValuationError};
use thiserror::Error;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Solver(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// What gets printed to stderr on failure.
#[derive(Debug, Serialize)]
pub struct ErrorRecord<'a> {
    pub error: &'a str,
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Data(_) | CliError::Write { .. } => EXIT_DATA,
            CliError::Solver(_) => EXIT_SOLVER,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Data(_) => "data",
            CliError::Write { .. } => "io",
            CliError::Solver(_) => "solver",
        }
    }

    pub fn record(&self) -> ErrorRecord<'_> {
        ErrorRecord {
            error: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
        }
    }
}

impl From<MarketError> for CliError {
    fn from(e: MarketError) -> Self {
        match e {
            MarketError::NonPositiveDays(_) | MarketError::InvalidPattern(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<SchedulerError> for CliError {
    fn from(e: SchedulerError) -> Self {
        match e {
            SchedulerError::InvalidInput(_) => CliError::Config(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<LifecycleError> for CliError {
    fn from(e: LifecycleError) -> Self {
        match &e {
            LifecycleError::InvalidParams(_) | LifecycleError::ZeroBudget(_) => {
                CliError::Config(e.to_string())
            }
            LifecycleError::Day { source, .. } => match CliError::from(source.clone()) {
                CliError::Config(_) => CliError::Config(e.to_string()),
                _ => CliError::Solver(e.to_string()),
            },
        }
    }
}

impl From<ValuationError> for CliError {
    fn from(e: ValuationError) -> Self {
        match &e {
            ValuationError::InvalidGrid(_) | ValuationError::InvalidCurve(_) => {
                CliError::Config(e.to_string())
            }
            ValuationError::Point { source, .. } => match CliError::from(source.clone()) {
                CliError::Config(_) => CliError::Config(e.to_string()),
                _ => CliError::Solver(e.to_string()),
            },
        }
    }
}
