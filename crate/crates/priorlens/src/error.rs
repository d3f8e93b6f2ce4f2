//! Crate-wide error type.
//!
//! Every fallible public operation returns [`Result`]. Variants are coarse on
//! purpose: callers branch on the *kind* of failure (bad argument, degenerate
//! numerics, I/O), while the payload string carries the specifics for humans.

use std::fmt;

/// Errors produced by this crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition.
    InvalidArgument(String),
    /// The input is structurally valid but lies in a degenerate configuration
    /// the operation cannot handle (ties, collinear sums, empty fits).
    Degenerate(String),
    /// A numerical procedure failed to reach its documented tolerance
    /// (quadrature disagreement, factorization failure, clamp excursion).
    Numerical(String),
    /// Reading or writing external data failed.
    Io(String),
    /// External data was read but could not be interpreted.
    Parse(String),
    /// An internal invariant was violated; indicates a bug in this crate.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Degenerate(msg) => write!(f, "degenerate input: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Internal(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
