use std::io;
use std::path::PathBuf;

use metrrc::params::ParamError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid parameters: {0}")]
    Param(String),
    #[error("unrecoverable: {0}")]
    Unrecoverable(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: bad chunk: {reason}")]
    Chunk { path: PathBuf, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Param(_) => 2,
            CliError::Unrecoverable(_) => 3,
            CliError::Io { .. } | CliError::Chunk { .. } => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Param(e.to_string())
    }
}

impl From<metrrc::Error> for CliError {
    fn from(e: metrrc::Error) -> Self {
        use metrrc::Error as E;
        match e {
            E::InsufficientData { .. } | E::Inconsistent | E::Unrecoverable(_) | E::Linalg(_) => {
                CliError::Unrecoverable(e.to_string())
            }
            _ => CliError::Param(e.to_string()),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
