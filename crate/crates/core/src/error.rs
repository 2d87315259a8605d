use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid Cayley table: {0}")]
    InvalidTable(String),
    #[error("invalid point-group action: {0}")]
    InvalidAction(String),
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
    #[error("operands belong to different groups")]
    MixedGroups,
    #[error("element does not belong to the group: {0}")]
    ForeignElement(String),
    #[error("unsupported for this group class: {0}")]
    UnsupportedForClass(String),
    #[error("enumeration horizon exhausted after radius {radius}")]
    EnumerationExhausted { radius: u64 },
    #[error("atoms do not form a partition: {0}")]
    NotAPartition(String),
    #[error("atom {atom} too small for its quota of {quota} elements")]
    AtomTooSmall { atom: usize, quota: usize },
    #[error("quotient of order {order} exceeds the cap {cap}")]
    QuotientTooLarge { order: u64, cap: u64 },
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("hypothesis fails: {0}")]
    HypothesisFails(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
