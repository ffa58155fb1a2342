use thiserror::Error;

/// Result alias used across the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("player {player} cannot read row {row}: it is on their forehead")]
    HiddenRow { player: usize, row: usize },

    #[error("index {index} out of range 1..={max}")]
    OutOfRange { index: usize, max: usize },

    #[error("hypothesis violated: {0}")]
    InsufficientPlayers(String),

    #[error("referee system is ambiguous: at least two integral solutions")]
    Ambiguous,

    #[error("sub-run for sorted tuple {tuple} is ambiguous")]
    SubrunAmbiguous { tuple: String },

    #[error("referee system has no nonnegative integral solution")]
    NoSolution,

    #[error("search limit of {limit} nodes exceeded")]
    LimitExceeded { limit: u64 },

    #[error("corrupt transcript: {0}")]
    CorruptTranscript(String),

    #[error("missing message from player {0}")]
    MissingMessage(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown function name `{0}`")]
    UnknownFunction(String),

    #[error("parse error: {0}")]
    Parse(String),
}
