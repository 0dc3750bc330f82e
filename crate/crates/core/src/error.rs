use thiserror::Error;

use crate::ring::CoefficientRing;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch {
        left: CoefficientRing,
        right: CoefficientRing,
    },

    #[error("constant term {constant} is not a unit in {ring}")]
    NonInvertible { constant: String, ring: CoefficientRing },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("series known through q^{available}, but q^{required} is needed")]
    InsufficientOrder { required: usize, available: usize },

    #[error("unknown ledger entry `{0}`")]
    UnknownEntry(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
