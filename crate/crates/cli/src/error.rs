use std::fmt;

use lr_horizon::Error;

/// Failure classes mapped to process exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, config or grid; exit code 2.
    Input(String),
    /// A solver or simulator failed; exit code 3.
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(m) => CliError::Input(m),
            Error::NoCrossing { .. } | Error::Internal(_) => CliError::Solver(e.to_string()),
        }
    }
}
