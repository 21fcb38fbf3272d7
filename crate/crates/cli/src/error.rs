use cp3o::Cp3oError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input data. Exit code 2.
    #[error("input error: {0}")]
    Input(String),
    /// Invalid flags or detection parameters. Exit code 3.
    #[error("configuration error: {0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Input(_) => 2,
            Self::Config(_) => 3,
        }
    }
}

impl From<Cp3oError> for CliError {
    fn from(e: Cp3oError) -> Self {
        if e.is_config_error() {
            Self::Config(e.to_string())
        } else {
            Self::Input(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
