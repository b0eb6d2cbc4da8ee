use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Bessel argument must be finite, got {0}")]
    NonFiniteArgument(f64),
    #[error("Bessel argument {0} is outside the supported range |x| < 1e6")]
    ArgumentOutOfRange(f64),
    #[error("Miller recurrence did not converge for x = {x}, max_order = {max_order}")]
    RecurrenceNotConverged { x: f64, max_order: usize },

    #[error("invalid resonance p/q = {p}/{q}: {reason}")]
    InvalidResonance { p: i64, q: i64, reason: String },
    #[error("invalid kick sequence: {0}")]
    InvalidSequence(String),

    #[error("lattice of {requested} sites exceeds the hard cap of {cap} sites")]
    GridCapExceeded { requested: usize, cap: usize },
    #[error("norm drift {drift:e} at step {step} exceeds the abort threshold {limit:e}")]
    NormDrift { step: u64, drift: f64, limit: f64 },
    #[error("invalid record schedule: {0}")]
    InvalidRecordSteps(String),

    #[error("moment order must be one of 2, 4, 6; got {0}")]
    InvalidMomentOrder(u32),
    #[error("exponent fit rejected: {0}")]
    FitRejected(String),

    #[error("configuration error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the CLI for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidResonance { .. }
            | Error::InvalidSequence(_)
            | Error::InvalidRecordSteps(_) => 1,
            Error::Verification(_) => 3,
            _ => 2,
        }
    }
}
