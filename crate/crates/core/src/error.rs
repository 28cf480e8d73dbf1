use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("k_bob out of range: {k_bob} not in [0, {n}]")]
    KBobOutOfRange { k_bob: usize, n: usize },

    #[error("oracle cap exceeded: {size} elements > cap {cap}")]
    OracleCapExceeded { size: usize, cap: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("degenerate signal frame: {0}")]
    DegenerateFrame(String),
}
