use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search bound {bound} exceeded: {what}")]
    Overflow { bound: i64, what: String },

    #[error("no prime ordering pair with both entries <= {bound}")]
    NoPrimePair { bound: u64 },

    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error("no verdict available: {0}")]
    UnknownVerdict(String),

    /// An inequality the theory guarantees failed numerically.
    #[error("inequality violated: {0}")]
    Violation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
