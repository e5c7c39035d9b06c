use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A bit index outside `1..=max`.
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: u64, max: u64 },

    /// Code length exponent outside the supported range.
    #[error("code length exponent n={n} outside {min}..={max}")]
    LengthExponent { n: u32, min: u32, max: u32 },

    /// Likelihood ratio that is not strictly positive and finite.
    #[error("invalid likelihood ratio {0}")]
    InvalidLr(f64),

    #[error("non-finite log-likelihood ratio {0}")]
    InvalidLlr(f64),

    /// An LR update left the representable range.
    #[error("likelihood ratio overflow")]
    LrOverflow,

    /// A stage deeper than the sharing factor was asked for an f/g selection.
    #[error("stage exponent {k} exceeds sharing factor {z}; that stage is shared")]
    StageShared { k: u32, z: u32 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid code spec: {0}")]
    InvalidSpec(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
