//! Pipeline commands behind the `mcwm` binary.

pub mod commands;
pub mod config;

use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or input; exit code 1.
    #[error("{0}")]
    Validation(String),
    /// Failure while running a valid configuration; exit code 2.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Validation(_) => ExitCode::from(1),
            CliError::Runtime(_) => ExitCode::from(2),
        }
    }
}

impl From<mcwm::Error> for CliError {
    fn from(e: mcwm::Error) -> Self {
        use mcwm::Error as E;
        match e {
            E::InfeasibleConstraint { .. } | E::TooLarge { .. } | E::Decode { .. } => {
                CliError::Runtime(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}
