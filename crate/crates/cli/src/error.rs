use std::path::PathBuf;

use singular_nls::Error as CoreError;
use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_FAILED: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: CoreError,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl CliError {
    /// 2 for anything the caller can fix in the input, 3 when a valid run
    /// could not be completed numerically.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core { source, .. } => match source {
                CoreError::NewtonDiverged { .. }
                | CoreError::LinearSolveFailed(_)
                | CoreError::NonFiniteEncountered { .. } => EXIT_FAILED,
                _ => EXIT_INVALID,
            },
            CliError::Io { .. } => EXIT_FAILED,
            CliError::ConfigInvalid(_) | CliError::Json { .. } => EXIT_INVALID,
        }
    }
}

pub trait Context<T> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError>;
}

impl<T> Context<T> for Result<T, CoreError> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core { context: what.into(), source })
    }
}

pub fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
