use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("elements belong to different groups")]
    GroupMismatch,
    #[error("singular matrix")]
    Singular,
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("search box of radius {box_radius} too small for ball radius {radius}")]
    SearchBoxTooSmall { box_radius: i64, radius: f64 },
    #[error("empty ball")]
    EmptyBall,
    #[error("dimension {dim} exceeds cap {cap}")]
    SizeCap { dim: usize, cap: usize },
    #[error("parity mismatch: {0}")]
    Parity(String),
    #[error("length function not proper: {0}")]
    NotProper(String),
    #[error("covariance violated: {0}")]
    Covariance(String),
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("action is not a homomorphism: residual {0:e}")]
    NotHomomorphic(f64),
    #[error("vector is not integral: {0}")]
    NotIntegral(String),
    #[error("ladder too short: {0} rungs")]
    LadderTooShort(usize),
    #[error("sequence too short: {len} < {min}")]
    SequenceTooShort { len: usize, min: usize },
    #[error("k_max {0} above cap 3")]
    KmaxTooLarge(usize),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
