use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    /// The limiting kernel does not exist at this conditioning.
    #[error(
        "kernel evaluated at a discontinuity: class {class} has beta*nu^(z-1) = {x} at beta_c = {beta_c}"
    )]
    AtDiscontinuity { class: usize, x: f64, beta_c: f64 },

    #[error("enumeration needs {states} states, cap is {cap}")]
    CapExceeded { states: f64, cap: u64 },

    #[error("conditioning counts are not integers: {0}")]
    NonIntegerCounts(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid collapsing scheme at t = {t}: {violation}")]
    Scheme { t: usize, violation: SchemeViolation },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeViolation {
    #[error("malformed partition: {0}")]
    MalformedPartition(String),
    #[error("first partition must be all singletons")]
    WrongStart,
    #[error("last partition must be the single block {{1, ..., q}}")]
    WrongEnd,
    #[error("non-coarsening step: a block of the previous partition is split")]
    NonCoarsening,
    #[error("non-strict step: the number of blocks did not decrease")]
    NonStrict,
}
