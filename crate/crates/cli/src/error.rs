use std::process::ExitCode;

use cqtraj_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// A computation stopped early (singularity, step budget, failed closure);
/// whatever was computed has been written and flagged.
pub const EXIT_ABORTED: u8 = 2;
pub const EXIT_INVALID_CONFIG: u8 = 3;
/// File system or serialization failure.
pub const EXIT_IO: u8 = 1;

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        let code = match self {
            CliError::Config(_) => EXIT_INVALID_CONFIG,
            CliError::Core(e) => match e {
                CoreError::InvalidModel(_)
                | CoreError::InvalidConfig(_)
                | CoreError::NonNormalizable
                | CoreError::NotStationary
                | CoreError::UnsupportedModel(_) => EXIT_INVALID_CONFIG,
                _ => EXIT_ABORTED,
            },
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => EXIT_IO,
        };
        ExitCode::from(code)
    }
}
