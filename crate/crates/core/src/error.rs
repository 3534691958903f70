use thiserror::Error;

/// Errors raised across the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("problem size {size} exceeds the configured limit {limit} for {context}")]
    SizeLimit {
        context: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("matrix is singular or numerically singular (condition estimate {condition_estimate:.3e})")]
    Singular { condition_estimate: f64 },

    #[error("spectrum is not admissible for the integral representation: {0}")]
    InadmissibleSpectrum(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_mismatch(
    context: &'static str,
    expected: impl ToString,
    found: impl ToString,
) -> Error {
    Error::DimensionMismatch {
        context,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
