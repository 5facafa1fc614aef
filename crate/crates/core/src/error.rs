use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("characteristic {0} is not zero or a supported prime")]
    InvalidCharacteristic(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("multi-index pair is not componentwise ordered at position {0}")]
    UnorderedPair(usize),
    #[error("point set is not convex")]
    NotConvex,
    #[error("subset is not contained in the ambient point set")]
    NotSubset,
    #[error("element is not an idempotent")]
    NotIdempotent,
    #[error("idempotent is not a sum of point idempotents")]
    NotPointIdempotent,
    #[error("weight {0:?} is not a composition of r = {1}")]
    NotAComposition(Vec<i64>, i64),
    #[error("Kostant integrality violated: {0}")]
    Integrality(String),
    #[error("operator is not in the span of the xi basis: {0}")]
    NotInXiSpan(String),
    #[error("tensor space dimension {0} exceeds the supported cap {1}")]
    TensorSpaceTooLarge(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
