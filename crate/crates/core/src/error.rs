use thiserror::Error;

/// Errors raised anywhere in the simulation stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("occupation {occupation} out of range for mode {mode} (dimension {dim})")]
    OutOfRange { mode: usize, occupation: usize, dim: usize },

    #[error("layout error: {0}")]
    Layout(String),

    #[error("truncation leakage {leakage:.3e} exceeds tolerance {tolerance:.3e}")]
    Truncation { leakage: f64, tolerance: f64 },

    #[error("measurement outcome has probability {probability:.3e}, below the null-outcome floor")]
    NullOutcome { probability: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("undefined branch: {0}")]
    UndefinedBranch(String),

    #[error("no closed form available: {0}")]
    NotDerived(String),

    #[error("postselected branch is infeasible (probability {probability:.3e})")]
    InfeasibleBranch { probability: f64 },

    #[error("integrator step underflow at t = {time:.6e} (dt = {step:.3e}); try tolerance {suggested_tol:.1e}")]
    StepUnderflow { time: f64, step: f64, suggested_tol: f64 },

    #[error("truncation too small: {0}")]
    EnlargeDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
