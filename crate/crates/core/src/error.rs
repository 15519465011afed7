//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DgwError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error(
        "stability violation: scale s = {scale} gives s*lambda = {s_lambda} > 4; \
         the wave kernel requires s < 4/lambda_max = {bound}"
    )]
    Stability { scale: f64, s_lambda: f64, bound: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("no event detected: all coefficients are zero")]
    NoEvent,

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, DgwError>;
