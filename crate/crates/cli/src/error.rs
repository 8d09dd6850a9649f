use thiserror::Error;

/// Failure of a command, carrying the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("data quality threshold breached: {0}")]
    DataQuality(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::DataQuality(_) => 2,
            _ => 1,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<thumbscope_corpus::ManifestError> for CliError {
    fn from(e: thumbscope_corpus::ManifestError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<thumbscope_corpus::SidecarError> for CliError {
    fn from(e: thumbscope_corpus::SidecarError) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
