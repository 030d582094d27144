use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("structure error: entry ({row}, {col}) {reason}")]
    Structure {
        row: usize,
        col: usize,
        reason: &'static str,
    },
    #[error("automaton is cyclic (state {state} lies on a cycle)")]
    Cyclic { state: usize },
    #[error("path enumeration exceeded {limit} paths")]
    PathExplosion { limit: usize },
    #[error("finite differences invalid near a tie: {0}")]
    TieWarning(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
