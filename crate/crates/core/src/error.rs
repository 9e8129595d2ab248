use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("incompatible group elements: {0}")]
    IncompatibleElements(String),

    #[error("matrix is singular")]
    Singular,

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("point is not on the variety: {0}")]
    OffVariety(String),

    #[error("unknown {kind} `{key}`")]
    UnknownKey { kind: &'static str, key: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration budget exceeded: more than {0} elements")]
    BudgetExceeded(usize),

    #[error("Monte Carlo budget too small: relative stderr {achieved:.3e} exceeds target {target:.3e}")]
    BudgetTooSmall { achieved: f64, target: f64 },

    #[error("quadrature did not converge after {0} nodes")]
    QuadratureDiverged(usize),

    #[error("too few points for a fit: need {needed}, have {have}")]
    TooFewPoints { needed: usize, have: usize },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
