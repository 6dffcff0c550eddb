use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("invalid config key `{0}`: {1}")]
    ConfigInvalid(String, String),
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] gromov_core::Error),
}

impl CliError {
    /// 2 for invalid input, 3 when a size cap was hit.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(gromov_core::Error::CapExceeded { .. })
            | CliError::Core(gromov_core::Error::SizeOverflow { .. })
            | CliError::Core(gromov_core::Error::BoxTooLarge(_))
            | CliError::Core(gromov_core::Error::DimensionCapExceeded(_)) => 3,
            CliError::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
