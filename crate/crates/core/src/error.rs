use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("maximum degree {requested} exceeds capacity {capacity}")]
    Capacity { requested: usize, capacity: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed data: {0}")]
    Format(String),
}

impl Error {
    /// Prefixes the message with `ctx`; capacity errors are returned unchanged.
    pub fn context(self, ctx: impl std::fmt::Display) -> Error {
        match self {
            Error::InvalidArgument(m) => Error::InvalidArgument(format!("{ctx}: {m}")),
            Error::Precondition(m) => Error::Precondition(format!("{ctx}: {m}")),
            Error::Format(m) => Error::Format(format!("{ctx}: {m}")),
            e @ Error::Capacity { .. } => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
