use thiserror::Error;

use crate::series::YearMonth;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series too short: {what} needs at least {required} observations, got {actual}")]
    TooShort {
        what: &'static str,
        required: usize,
        actual: usize,
    },

    #[error("non-finite value at position {index} (1-based)")]
    NonFinite { index: usize },

    #[error("non-positive value {value} at position {index} cannot be log-transformed")]
    NonPositive { index: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("window [{start}, {end}] exceeds series of length {len}")]
    WindowOutOfBounds { start: usize, end: usize, len: usize },

    #[error("transfer function is numerically zero at psi = {psi}")]
    SingularTransfer { psi: f64 },

    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("csv line {line}: missing month {expected} (found {found})")]
    MissingMonth {
        line: usize,
        expected: YearMonth,
        found: YearMonth,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Input errors are reported with exit code 2 by the CLI.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
