use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the core crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid configuration: bad bounds, dimension mismatch, unknown names.
    Config(String),
    /// An operation was called outside of its contract, e.g. on an empty set.
    Usage(String),
    /// The evaluator produced a non-finite objective value.
    Evaluation {
        problem: String,
        input: alloc::vec::Vec<f64>,
        detail: String,
    },
    /// The requested capability does not exist for this problem.
    Unsupported(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Usage(msg) => write!(f, "usage error: {msg}"),
            Error::Evaluation {
                problem,
                input,
                detail,
            } => write!(
                f,
                "evaluation error in {problem}: {detail} (input {input:?})"
            ),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
