use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cutoff {cutoff} cannot hold amplitude {amplitude}; need at least {required}")]
    Infeasible { amplitude: f64, cutoff: u32, required: u32 },

    #[error(transparent)]
    Core(#[from] pqs_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    /// Process exit code: 2 for configuration problems, 3 for cutoff
    /// infeasibility, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Infeasible { .. } => 3,
            HarnessError::Core(pqs_core::Error::CutoffTooSmall { .. }) => 3,
            HarnessError::Core(
                pqs_core::Error::InvalidArgument(_) | pqs_core::Error::Parse(_),
            ) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
