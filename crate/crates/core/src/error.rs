use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid query {query} at state {state}: {reason}")]
    InvalidQuery {
        state: String,
        query: String,
        reason: String,
    },

    #[error("shape mismatch: expected {expected} components, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("component {index} is empty")]
    EmptyComponent { index: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("depth limit {limit} exceeded")]
    DepthLimit { limit: u32 },

    #[error("cache file error at line {line}: {message}")]
    Cache { line: usize, message: String },

    #[error("policy `{policy}` failed: {message}")]
    Policy { policy: String, message: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
