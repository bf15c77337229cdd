//! Scenario runner behind the `waveguide` command line tool.

pub mod config;
pub mod output;
pub mod runner;

use thiserror::Error;
use waveguide_core::{OracleError, PropagatorError, SpecialFunctionError};

pub use config::{Mode, OutputFormat, Scenario, ScenarioConfig};
pub use runner::{execute, run, Execution};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 for invalid input, 2 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<SpecialFunctionError> for CliError {
    fn from(e: SpecialFunctionError) -> Self {
        match e {
            SpecialFunctionError::NoConvergence { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<PropagatorError> for CliError {
    fn from(e: PropagatorError) -> Self {
        match e {
            PropagatorError::NoConvergence { .. } => CliError::Numerical(e.to_string()),
            PropagatorError::Special(s) => s.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::StepTooLarge { .. } => CliError::Numerical(e.to_string()),
            OracleError::Propagator(p) => p.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}
