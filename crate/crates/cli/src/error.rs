use thiserror::Error;

/// Failures mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("guarantee violated: {0}")]
    Violation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

pub const EXIT_PASS: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;
pub const EXIT_IO: u8 = 4;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Violation(_) => EXIT_VIOLATION,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<resknap_core::Error> for CliError {
    fn from(e: resknap_core::Error) -> CliError {
        match e {
            resknap_core::Error::Parse { .. } => CliError::Parse(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
