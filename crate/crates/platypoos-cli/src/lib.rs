//! Experiment harness for the planners: config files, single runs,
//! receding-horizon rollouts, sweeps and diagnostics, with deterministic
//! machine-readable outputs.

pub mod config;
pub mod diagnose;
pub mod fixtures;
pub mod record;
pub mod runner;
pub mod sweep;

use std::fmt;

/// Errors split by exit code: configuration problems exit with 2, runtime
/// failures with 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Runtime(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<platypoos::PlannerError> for CliError {
    fn from(e: platypoos::PlannerError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}
