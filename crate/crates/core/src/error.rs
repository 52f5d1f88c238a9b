use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Dimensions that cannot produce the requested structure.
    #[error("sizing error: {0}")]
    Sizing(String),

    /// A generator target that no graph of the requested variant can meet.
    #[error("infeasible network: {0}")]
    Infeasible(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("node {node} out of range for graph with {count} nodes")]
    Index { node: usize, count: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("plan error: {0}")]
    Plan(String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Errors caused by the caller's configuration rather than the run itself.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Argument(_) | Error::Manifest(_) | Error::InvalidParams(_) | Error::Sizing(_))
    }
}
