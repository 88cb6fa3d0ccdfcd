use std::io;
use std::path::{Path, PathBuf};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Core(#[from] hproj_core::Error),
    #[error("{}: {source}", path.display())]
    At { path: PathBuf, source: Box<Error> },
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn malformed(detail: impl Into<String>) -> Self {
        Error::Malformed(detail.into())
    }

    /// Attaches the file the error came from.
    pub fn at(self, path: &Path) -> Self {
        match self {
            e @ (Error::Io { .. } | Error::At { .. }) => e,
            e => Error::At {
                path: path.to_path_buf(),
                source: Box::new(e),
            },
        }
    }

    /// Usage errors exit with 2, everything else with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            _ => 1,
        }
    }
}
