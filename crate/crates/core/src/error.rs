use thiserror::Error;

/// Errors raised by the point-set model and the algorithms built on it.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("invalid window: lower bound must be strictly below upper bound on every axis")]
    InvalidWindow,

    #[error("point lies outside the declared window")]
    PointOutsideWindow,

    #[error("negative multiplicity in a positive set")]
    NegativeMultiplicity,

    #[error("margin {margin} is too large for the window")]
    MarginTooLarge { margin: f64 },

    #[error("signed sets are not supported by the geometric criterion")]
    SignedSetUnsupported,

    #[error("bottleneck value exceeds the boundary margin {margin}")]
    MarginTooSmall { margin: f64 },

    #[error("shift leaves no interior region inside the window")]
    WindowTooSmall,

    #[error("region exceeds the sampling window")]
    RegionExceedsWindow,

    #[error("degenerate lattice matrix (|det| = {det:e})")]
    DegenerateLattice { det: f64 },

    #[error("exponential polynomial is not real valued")]
    NotRealValued,

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("search limit exceeded: {0}")]
    SearchLimit(String),

    #[error("2-adic valuation needs an even nonzero integer, got {0}")]
    OddOrZeroInput(i64),

    #[error("index {0} outside the sampled range")]
    IndexOutOfRange(i64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no point at or above the origin to anchor the sequence")]
    NoAnchor,
}

pub type Result<T> = std::result::Result<T, Error>;
