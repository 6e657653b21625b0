use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Error {
    /// Affine dimension of the input is below the ambient dimension.
    #[error("degenerate input: affine dimension {found} < {expected}")]
    DegenerateInput { expected: usize, found: usize },

    #[error("not enough points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("origin lies on the affine hull of the facet")]
    OriginOnFacetHull,

    #[error("origin is not interior to the hull")]
    OriginNotInterior,

    #[error("intensity {lambda} is below the admissible threshold {lambda0}")]
    LambdaTooSmall { lambda: f64, lambda0: f64 },

    #[error("instance of size {size} exceeds oracle cap {cap}")]
    InstanceTooLarge { size: usize, cap: usize },

    #[error("point {0:?} lies outside the festoon domain")]
    OutsideDomain(Vec<f64>),

    #[error("internal angle beta_({k},{d_minus_1}) is not available")]
    MissingBeta { k: usize, d_minus_1: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("truncation shell contributes {share:.3} of the estimate (limit {limit})")]
    TruncationDominates { share: f64, limit: f64 },

    #[error("{failed} of {total} replicates failed, above the degeneracy budget {budget}")]
    DegeneracyBudget { failed: usize, total: usize, budget: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
