use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid time series: {0}")]
    InvalidSeries(String),

    #[error("dimension mismatch: expected d = {expected}, found d = {found}")]
    Dimension { expected: usize, found: usize },

    #[error("order mismatch: path has order ({path_rows}, {path_cols}) but series have lengths ({rows}, {cols})")]
    Order {
        path_rows: usize,
        path_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("invalid warping path: {0}")]
    InvalidPath(String),

    #[error("inconsistent configuration: {0}")]
    Configuration(String),

    #[error("enumeration guard exceeded: {0}")]
    Guard(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
