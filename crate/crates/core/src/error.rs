//! Crate-wide error type, split along the exit-code contract of the CLI:
//! configuration errors (1), data errors (2), I/O errors (3).

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid or inconsistent configuration (bad flags, missing roots,
    /// degenerate datasets that cannot be processed as requested).
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed or inconsistent input data (parse failures, invariant
    /// violations in record files, dimension mismatches).
    #[error("data error: {0}")]
    Data(String),

    /// Filesystem-level failure.
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code for this error class: 1 configuration, 2 data, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Data(_) => 2,
            Error::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
