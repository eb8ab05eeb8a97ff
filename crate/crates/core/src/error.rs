//! Error type shared by the whole library.

use thiserror::Error;

/// Failure modes of the verification toolkit.
///
/// The variants are grouped by how a caller should react: bad inputs,
/// a verification that honestly failed, or an internal guard that fired.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the arguments was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The restricted dual support leaves some row constraints without any
    /// variable; the caller is expected to enlarge eps and rebuild.
    #[error("restricted dual at m={m} leaves rows {rows:?} uncovered")]
    EmptyDualRows { m: u32, rows: Vec<u32> },

    /// No eps within the retry budget certified the sweep bound at this m.
    #[error("sweep could not certify the bound at m={m}")]
    SweepFailed { m: u32 },

    /// The admissible window for the certificate constant is empty.
    #[error("empty constant window: lower {lower} exceeds upper {upper}")]
    EmptyWindow { lower: String, upper: String },

    /// A check ran to completion and the claimed property does not hold.
    #[error("verification failed: {0}")]
    Verification(String),

    /// An internal invariant was violated; indicates a bug, not bad input.
    #[error("internal guard: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI process exit code: 1 for failed verifications, 2 for bad usage,
    /// 3 for internal guards and I/O trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Verification(_) | Error::SweepFailed { .. } | Error::EmptyWindow { .. } => 1,
            Error::InvalidArgument(_) | Error::EmptyDualRows { .. } => 2,
            Error::Internal(_) | Error::Io(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
