use std::fmt;

use teichscan_core::Error;

/// Process exit statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    /// The input is not a valid surface or curve, a computation failed, or
    /// a checked property did not hold.
    Validation = 1,
    /// An enumeration ran out of its budget.
    Budget = 2,
    /// Bad flags, settings, files or schema versions.
    Config = 3,
}

#[derive(Debug, thiserror::Error)]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { code: ExitCode::Config, message: message.into() }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        CliError { code: ExitCode::Validation, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget { .. } => ExitCode::Budget,
            Error::Invalid(_) | Error::Range(_) => ExitCode::Config,
            _ => ExitCode::Validation,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::config(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::config(format!("json: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
