use alloc::string::String;

use crate::rational::Rational;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Text input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// Embedded seed data failed its validation suite.
    #[error("corrupt seed catalog: {0}")]
    CorruptSeed(String),

    /// Matrices or vectors whose sizes do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A certificate violates a structural invariant (negative diagonal entry, ...).
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    /// The certificate is well formed but does not prove the claimed bound.
    #[error("verification failed at catalog entry {witness}: recomputed bound {recomputed} exceeds claimed {claimed}")]
    VerificationFailed {
        witness: usize,
        recomputed: Rational,
        claimed: Rational,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
