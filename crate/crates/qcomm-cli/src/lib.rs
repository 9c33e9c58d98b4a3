//! Experiment runner for the `qcomm` simulator: instance files, protocol
//! runs, parameter sweeps with CSV ledgers and plots, and the acceptance
//! suite.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod generate;
pub mod report;
pub mod run;

use qcomm::baselines::BaselineError;
use qcomm::instances::InstanceError;
use qcomm::protocols::ProtocolError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("protocol {protocol} needs a {expected} instance, got a {instance} instance")]
    Topology { protocol: String, expected: String, instance: String },
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e.to_string())
    }
}

impl CliError {
    /// Process exit code: 2 for misuse, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            _ => 1,
        }
    }
}
