use std::path::{Path, PathBuf};

use gsa_core::GsaError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Numeric(GsaError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<GsaError> for CliError {
    fn from(e: GsaError) -> Self {
        match e {
            e if e.is_numeric() => CliError::Numeric(e),
            GsaError::Io(source) => CliError::Io {
                path: PathBuf::from("<output>"),
                source,
            },
            GsaError::RunFailed { .. } => CliError::Numeric(e),
            other => CliError::Usage(other.to_string()),
        }
    }
}
