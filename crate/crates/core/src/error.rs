use thiserror::Error;

/// Errors raised by the algebra engine and its front ends.
#[derive(Debug, Error)]
pub enum Error {
    #[error("variable count mismatch: expected {expected}, found {found}")]
    VariableCountMismatch { expected: usize, found: usize },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("elements belong to different rings ({left} vs {right})")]
    RingMismatch { left: String, right: String },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("monomial {0} is not a basis element")]
    NotInBasis(String),

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: u64, found: u64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("resource ceiling exceeded: {0}")]
    ResourceExceeded(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("operation requires a nonzero element")]
    ZeroElement,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(input: &str, offset: usize, message: impl Into<String>) -> Self {
        let before = &input[..offset.min(input.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Parse { line, column, message: message.into() }
    }
}
