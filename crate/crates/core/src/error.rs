use thiserror::Error;

/// Errors raised by the library. Budget and verification failures are kept
/// distinct from plain input errors so that front ends can map them onto
/// separate exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("letter {letter} is outside the alphabet of size {alphabet_size}")]
    AlphabetMismatch { letter: usize, alphabet_size: usize },

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("growth stalled: |phi^n({seed})| stopped increasing at {length}")]
    GrowthStall { seed: usize, length: u64 },

    #[error("unbalanced pair: abelian vectors {top:?} and {bottom:?} differ")]
    Imbalance { top: Vec<u64>, bottom: Vec<u64> },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("insufficient data for entry n = {entry}: {reason}")]
    InsufficientData { entry: usize, reason: String },

    #[error("coded prefix too short: level {level} needs {needed} letters, only {available} are realized")]
    PrefixTooShort { level: usize, needed: u64, available: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
