use thiserror::Error;

#[derive(Debug, Error)]
pub enum BffError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("history has no snapshots")]
    EmptyHistory,

    #[error("node set is empty")]
    EmptySet,

    #[error("node id {id} out of range for a universe of {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },

    #[error("{0}")]
    Domain(String),

    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    #[error("invalid instance spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = BffError> = std::result::Result<T, E>;

impl BffError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        BffError::Domain(msg.into())
    }
}
