use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{metric}: non-finite score {value} for hyp={hyp:?} ref={reference:?}")]
    NonFinite {
        metric: String,
        value: f64,
        hyp: String,
        reference: String,
    },

    #[error("{metric}: score {value} outside declared range [{lo}, {hi}]")]
    OutOfRange {
        metric: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no comparable content: {0}")]
    NoComparableContent(String),

    #[error("{metric} does not support {what}")]
    Unsupported { metric: String, what: String },

    #[error("undefined statistic: {0}")]
    Undefined(String),

    #[error("scorer failed on pair ({hyp:?}, {reference:?}): {source}")]
    Pair {
        hyp: String,
        reference: String,
        #[source]
        source: Box<Error>,
    },

    #[error("bridge: {0}")]
    Bridge(#[from] crate::bridge::BridgeError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
