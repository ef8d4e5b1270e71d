use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain diameter {0} exceeds 1")]
    DiameterExceeded(f64),
    #[error("empty domain: {0}")]
    EmptyDomain(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("sample plan yields fewer than 2 distinct points")]
    DegeneratePlan,
    #[error("derivative of order {requested} requested, function provides up to {available}")]
    OrderExceeded { requested: usize, available: usize },
    #[error("point is not interior to the domain")]
    BoundaryPoint,
    #[error("segment leaves the domain")]
    SegmentLeavesDomain,
    #[error("interpolation nodes are not distinct")]
    DuplicateNodes,
    #[error("interpolation node {0} is outside (0, 1)")]
    NodeOutOfRange(f64),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("invalid Hölder index (k = {k}, s = {s}): {reason}")]
    InvalidIndex { k: usize, s: f64, reason: String },
    #[error("BCH inputs outside the convergence domain: |x| + |y| = {sum} > {limit}")]
    OutsideConvergenceDomain { sum: f64, limit: f64 },
    #[error("matrix outside the logarithm domain: |g - I| = {0}")]
    LogDomain(f64),
    #[error("iteration did not converge: {0}")]
    NotConverged(String),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
