use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("key index {index} out of range for a channel with {n} unitaries")]
    KeyOutOfRange { index: usize, n: usize },

    #[error("key of party {party} is not available; decoding refused")]
    MissingKey { party: usize },

    #[error("resource guard: {parameter} = {value} exceeds the limit {limit}")]
    ResourceGuard {
        parameter: &'static str,
        value: u128,
        limit: u128,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
