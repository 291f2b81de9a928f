use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("resource limit: {what} = {value} exceeds cap {cap}")]
    ResourceLimit {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    /// A certificate node does not follow from its children, or a leaf
    /// fails its oracle check. `path` lists child indices from the root.
    #[error("verification failed at {}: {reason}", display_path(.path))]
    Verification { path: Vec<usize>, reason: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A constructive step that must succeed did not.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub(crate) fn display_path(path: &[usize]) -> String {
    let mut s = String::from("root");
    for i in path {
        s.push('/');
        s.push_str(&i.to_string());
    }
    s
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
