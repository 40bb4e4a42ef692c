use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used for process exit codes and FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad parameters or flags.
    Config,
    /// Unreadable or malformed input data.
    Data,
    /// A broken internal invariant (bookkeeping corruption).
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("unknown word: {0:?}")]
    UnknownWord(String),

    #[error("no trie node for prefix {0:?}")]
    NoSuchNode(String),

    #[error("empty word")]
    EmptyWord,

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("internal invariant violated: {0}")]
    Corruption(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_) => ErrorKind::Config,
            Error::Corruption(_) => ErrorKind::Internal,
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::UnknownWord(_)
            | Error::NoSuchNode(_)
            | Error::EmptyWord
            | Error::EmptyInput(_) => ErrorKind::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(
        source_name: impl Into<String>,
        line: usize,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }
}
