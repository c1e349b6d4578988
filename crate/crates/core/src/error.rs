use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The regularized Gram matrix could not be inverted.
    #[error("singular matrix (|det| = {det:e})")]
    SingularMatrix { det: f64 },

    /// A channel realization for which a relay normalization or detector is undefined.
    #[error("degenerate channel: {0}")]
    DegenerateChannel(&'static str),

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
