use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("angle {0} outside the admissible range")]
    OutOfRange(String),
    #[error("basis construction failed at level {level}: {reason}")]
    Basis { level: u64, reason: String },
    #[error("closed form dispatch failed for v({level},{a}): {reason}")]
    ClosedForm { level: u64, a: i64, reason: String },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
