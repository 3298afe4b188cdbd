use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension error: {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("inversion error: word is not a codeword")]
    Inversion,

    #[error("construction error: {0}")]
    Construction(String),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn dim(what: &'static str, expected: usize, got: usize) -> Self {
        Error::Dimension {
            what,
            expected,
            got,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}
