//! Error type shared by every module.

/// Library-wide error enum.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Enumeration or table size exceeded the configured cap; the message
    /// carries the exact count so callers can report it.
    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("evaluation failed to stabilize at {0} bits of precision")]
    PrecisionExhausted(u32),

    #[error("eigensolver did not converge after {0} sweeps")]
    EigenNonConvergence(usize),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
