use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph6 string: {0}")]
    Graph6(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("enumeration needs 2^{needed} configurations, cap is 2^{cap}")]
    CapExceeded { needed: usize, cap: usize },

    #[error("sign not certified at {bits} bits")]
    Uncertified { bits: u32 },

    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
