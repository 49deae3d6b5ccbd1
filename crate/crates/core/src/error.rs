use thiserror::Error;

/// Errors raised by the numeric routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A table or sieve is too small for the requested query.
    #[error("{what} out of range: need bound {required}, have {available}")]
    OutOfRange {
        what: &'static str,
        required: u64,
        available: u64,
    },

    /// The fixed-width exact path cannot hold the result.
    #[error("exact 128-bit trace would overflow for k={k}, n={n}; use the arbitrary-precision or floating path")]
    Overflow { k: u32, n: u64 },

    #[error("malformed class number cache: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
