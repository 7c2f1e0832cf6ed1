use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two maps over different ground sets were combined.
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),

    /// A caller-supplied argument violated an operation's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An internal consistency check failed. These indicate a bug rather
    /// than bad input.
    #[error("structural error: {0}")]
    Structural(String),

    /// Malformed textual or JSON input.
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}

pub(crate) fn structural<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Structural(msg.into()))
}
