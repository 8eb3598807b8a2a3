use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library.
///
/// [`Error::is_precondition`] separates mathematical precondition failures
/// from malformed or inconsistent input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("zero vector has no primitive representative")]
    ZeroVector,
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unknown {kind} '{id}'")]
    Unknown { kind: &'static str, id: String },
    #[error("invalid root system {family}{rank}")]
    InvalidRootSystem { family: String, rank: usize },
    #[error("Weyl element {0} is not a minimal coset representative")]
    NotMinimalCosetRep(String),
    #[error("Levi mismatch: {0}")]
    LeviMismatch(String),
    #[error("graph not α-complete at simple root {0}")]
    NotAlphaComplete(usize),
    #[error("disconnected path: {0}")]
    DisconnectedPath(String),
    #[error("not piecewise linear: {0}")]
    NotPiecewiseLinear(String),
    #[error("complete case only")]
    NotComplete,
    #[error("criterion valid only for toroidal embeddings")]
    NotToroidal,
    #[error("divisor is not Cartier along orbit {0}")]
    NotCartier(String),
    #[error("class undefined for this pair: {0}")]
    UndefinedClass(String),
    #[error("weights are not proportional to the character")]
    NotProportional,
    #[error("resolution rejected: {0}")]
    BadResolution(String),
    #[error("{0}")]
    Precondition(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn unknown(kind: &'static str, id: impl Into<String>) -> Self {
        Error::Unknown { kind, id: id.into() }
    }

    /// True for failures of a mathematical hypothesis on otherwise valid data.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::ZeroVector
                | Error::NotMinimalCosetRep(_)
                | Error::NotAlphaComplete(_)
                | Error::DisconnectedPath(_)
                | Error::NotPiecewiseLinear(_)
                | Error::NotComplete
                | Error::NotToroidal
                | Error::NotCartier(_)
                | Error::UndefinedClass(_)
                | Error::NotProportional
                | Error::BadResolution(_)
                | Error::Precondition(_)
        )
    }
}
