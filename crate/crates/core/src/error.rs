use thiserror::Error;

/// Errors raised by the library.
///
/// The variants split into input validation problems and scale limits, so
/// front ends can map them to distinct exit codes with [`Error::is_scale`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("graph6 parse error at byte {offset}: {reason}")]
    Graph6 { offset: usize, reason: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("arrangement does not fit the graph: {0}")]
    ArrangementMismatch(String),

    #[error("{what} exceeds the supported scale ({got} > {limit})")]
    Scale {
        what: &'static str,
        got: usize,
        limit: usize,
    },
}

impl Error {
    pub fn is_scale(&self) -> bool {
        matches!(self, Error::Scale { .. })
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn scale(what: &'static str, got: usize, limit: usize) -> Self {
        Error::Scale { what, got, limit }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
