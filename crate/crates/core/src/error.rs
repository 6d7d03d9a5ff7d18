use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degenerate measurement: realized outcome has probability {probability:e}")]
    DegenerateMeasurement { probability: f64 },

    #[error("degenerate signal: projected norm {norm:e} is too small to normalize")]
    DegenerateSignal { norm: f64 },

    #[error("degenerate decode: codespace weight {weight:e}")]
    DegenerateDecode { weight: f64 },

    #[error("degenerate gate: state norm {norm:e} after noisy gate")]
    DegenerateGate { norm: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Numerical dead ends a single trajectory can hit; the harness counts
    /// these instead of aborting.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegenerateMeasurement { .. }
                | Error::DegenerateSignal { .. }
                | Error::DegenerateDecode { .. }
                | Error::DegenerateGate { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
