use thiserror::Error;

use crate::bayesnet::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library. Numerical trouble inside a single elemental
/// estimate is reported as a pair status, not as an error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(ValidationReport),

    #[error("instantiation has {got} states, network has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state {state} of variable {variable} exceeds cardinality {cardinality}")]
    StateOutOfRange {
        variable: usize,
        state: usize,
        cardinality: usize,
    },

    #[error("enumeration needs {required} instantiations, cap is {cap}")]
    EnumerationCapExceeded { required: u128, cap: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {value} is outside its domain {domain}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    #[error("zero-probability instantiation; log-probability undefined")]
    ZeroProbability,

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("invalid RGPD parameters delta = {delta}, alpha = {alpha}: {reason}")]
    InvalidParams {
        delta: f64,
        alpha: f64,
        reason: &'static str,
    },

    #[error("m < 20: only {m} sample values lie below the threshold")]
    InsufficientTail { m: usize },

    #[error("only {usable} usable pair estimates (need at least 3)")]
    TooFewEstimates { usable: usize },

    #[error("no threshold separates the sample: {0}")]
    NoSeparatingThreshold(String),

    #[error(
        "threshold schedule undershot: u = {u} leaves {count} values below (need at least 20)"
    )]
    ScheduleUndershoot { u: f64, count: usize },

    #[error("malformed network file: {0}")]
    NetworkFormat(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
