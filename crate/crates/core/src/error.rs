use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("operator is identically zero")]
    ZeroOperator,

    #[error("power iteration did not converge within {iterations} iterations (ill-conditioned operator)")]
    NormNotConverged { iterations: usize },

    #[error("operator norm {norm} exceeds 1; normalize the problem first")]
    NotNormalized { norm: f64 },

    #[error("numerical failure (NaN or overflow) at outer iteration {iteration}")]
    NumericalFailure { iteration: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
