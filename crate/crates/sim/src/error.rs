use std::path::PathBuf;

use doppler_skg_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("numerical: {0}")]
    Numerical(#[from] CoreError),
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("output: {0}")]
    Output(String),
}

pub type SimResult<T> = std::result::Result<T, SimError>;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const USAGE: u8 = 2;
    pub const CONFIG: u8 = 3;
    pub const NUMERICAL: u8 = 4;
    pub const IO: u8 = 5;
}

impl SimError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            SimError::Usage(_) => exit::USAGE,
            SimError::Config(_) => exit::CONFIG,
            SimError::Numerical(CoreError::Usage(_)) => exit::USAGE,
            SimError::Numerical(_) => exit::NUMERICAL,
            SimError::Io { .. } | SimError::Output(_) => exit::IO,
        }
    }
}
