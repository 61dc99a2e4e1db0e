use thiserror::Error;

/// Errors produced by instance construction, parsing, and the solvers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: instance has {expected} variables, assignment has {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("invalid {what} #{index}: {message}")]
    Invalid {
        what: &'static str,
        index: usize,
        message: String,
    },

    #[error("n = {n} exceeds the cap of {cap} for this operation")]
    TooLarge { n: usize, cap: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("objective scale overflows the integer kernel: {0}")]
    Overflow(String),

    #[error("refused: {0}")]
    Refused(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(what: &'static str, index: usize, message: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            index,
            message: message.into(),
        }
    }

    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }
}
