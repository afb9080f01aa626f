use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the post-processing stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("degenerate frame: zero-norm vector")]
    DegenerateFrame,

    #[error("non-physical covariance matrix: {0}")]
    NonPhysical(String),

    #[error("alist parse error at line {line}: {reason}")]
    Alist { line: usize, reason: String },

    #[error("empty code registry")]
    EmptyRegistry,

    #[error("no source available for coarse estimation")]
    NoCoarseSource,

    #[error("malformed wire record: {0}")]
    Wire(String),

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
