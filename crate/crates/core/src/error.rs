use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation error: {what} has tail mass {tail:.3e} beyond n_max = {n_max}")]
    Truncation {
        what: String,
        tail: f64,
        n_max: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("wrong basis: expected {expected}, got {got}")]
    WrongBasis {
        expected: &'static str,
        got: &'static str,
    },

    #[error("invariant violated at t = {t:.6} tau0: {what}")]
    InvariantViolation { t: f64, what: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
