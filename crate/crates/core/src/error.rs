use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular block on dropped indices {{{0}}} (disconnected interior component?)")]
    SingularBlock(String),

    #[error("matrix kernel is larger than the all-ones line (disconnected network)")]
    Disconnected,

    #[error("not a valid response matrix: {0}")]
    InvalidResponse(String),

    #[error("not an electrical resistance metric")]
    NotResistanceMetric,

    #[error("not Kalmanson for this order (negative split weight on arc {0})")]
    NotKalmanson(String),

    #[error("problem size {0} exceeds guard {1}; use minor-based queries instead")]
    SizeGuard(usize, usize),

    #[error("missing planar embedding (rotation system)")]
    MissingEmbedding,

    #[error("inconsistent re-entrant matrix (numeric noise or non-planar input)")]
    InconsistentReentrants,

    #[error("invalid strand matching: {0}")]
    InvalidMatching(String),

    #[error("no available representative terminal for {0}")]
    NoRepresentative(String),

    #[error("ambiguous attachment for bridge {0}: candidate nodes {1}")]
    AttachmentAmbiguity(String, String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
