use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("occupation key has {found} modes, state has {expected}")]
    KeyLength { expected: usize, found: usize },

    #[error("occupation {key} exceeds the cutoff {cutoff}")]
    CutoffExceeded { key: String, cutoff: u32 },

    #[error("shape mismatch: (modes, cutoff) {left:?} vs {right:?}")]
    ShapeMismatch { left: (usize, u32), right: (usize, u32) },

    #[error("mode {mode} out of range for a {mode_count}-mode state")]
    ModeOutOfRange { mode: usize, mode_count: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("heralding probability is zero")]
    ZeroProbability,

    #[error("normalization diverges: {0}")]
    DegenerateNormalization(String),

    #[error("cutoff {cutoff} too small: tail weight {tail:.3e} for amplitude {amplitude} (need cutoff {required})")]
    CutoffTooSmall { amplitude: f64, cutoff: u32, tail: f64, required: u32 },

    #[error("squeezer idle mode {mode} is not in vacuum")]
    IdleNotVacuum { mode: usize },

    #[error("series expansion leaves the truncated space at cutoff {cutoff}")]
    SeriesOverflow { cutoff: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
