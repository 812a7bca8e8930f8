use thiserror::Error;

/// Errors raised when values violate the domain of the auction model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("at least two participants are required, got {0}")]
    TooFewParticipants(usize),

    #[error("participant id {0} appears more than once")]
    DuplicateParticipant(usize),

    #[error("unknown participant id {0}")]
    UnknownParticipant(usize),

    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("entry for participant {id} is negative: {value}")]
    NegativeEntry { id: usize, value: String },

    #[error("allocation flag for participant {id} must be 0 or 1, got {flag}")]
    InvalidFlag { id: usize, flag: u8 },

    #[error("values are defined over different participant sets")]
    ParticipantMismatch,

    #[error("invalid bid grid: {0}")]
    InvalidGrid(String),

    #[error("value {value} for participant {id} is not on the grid")]
    OffGrid { id: usize, value: String },

    #[error("malformed rational {0:?}")]
    MalformedRational(String),

    #[error("at least one tie-break policy is required")]
    NoPolicies,
}

pub type Result<T> = std::result::Result<T, DomainError>;
