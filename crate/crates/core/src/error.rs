use thiserror::Error;

/// Errors produced across the library.
///
/// The variants split into two families: malformed input (exit code 2 on the
/// command line) and mathematical failures on well-formed input (exit code 1).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("semantic error in section `{section}`: {message}")]
    Semantic { section: String, message: String },

    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    #[error("numerical error in block {block}: {message}")]
    Numerical { block: String, message: String },

    #[error("domain error: {message} (offending eigenvalue {eigenvalue:e})")]
    Domain { message: String, eigenvalue: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("inconsistent data: {0}")]
    Inconsistent(String),
}

impl Error {
    /// True for errors caused by malformed input rather than by a failed
    /// mathematical check.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Input(_) | Error::Syntax { .. } | Error::Semantic { .. } | Error::RingMismatch(_)
        )
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn semantic(section: &str, msg: impl Into<String>) -> Self {
        Error::Semantic {
            section: section.to_string(),
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
