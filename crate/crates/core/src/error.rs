use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("cardinality mismatch: {left} anchors vs {right}")]
    CardinalityMismatch { left: usize, right: usize },
    #[error("instance rejected: {0}")]
    InstanceRejected(String),
    #[error("lift rejected at {point}: {reason}")]
    LiftRejected { point: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
