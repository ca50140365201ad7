use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("root finder did not converge after {iterations} iterations (max correction {max_correction:e})")]
    NonConvergence {
        iterations: usize,
        max_correction: f64,
    },

    #[error("integration stalled at t = {time}: {reason}")]
    StepFailure { time: f64, reason: String },

    #[error("polynomial degree {degree} exceeds operator dimension {limit}")]
    DegreeViolation { degree: usize, limit: usize },

    #[error("operator expects {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("positions {i} and {j} coincide (separation {separation:e})")]
    CoincidentPositions { i: usize, j: usize, separation: f64 },

    #[error("P vanishes at position {index}")]
    PZero { index: usize },

    #[error("collision at t = {time:.9}: particles {i} and {j} at separation {separation:e}")]
    Collision {
        time: f64,
        i: usize,
        j: usize,
        separation: f64,
    },

    #[error("configuration is not Z2-symmetric: {0}")]
    SymmetryViolation(String),

    #[error("no multiset return found within {span} (best mismatch {best:e})")]
    NoReturnFound { span: f64, best: f64 },

    #[error("roots at relative distance {distance:e} cannot be separated by clustering tolerance {ctol:e}")]
    ClusterAmbiguity { distance: f64, ctol: f64 },

    #[error("Wronskian is identically zero")]
    DegenerateWronskian,

    #[error("k = {0} is not a multiple of 4")]
    BadK(usize),

    #[error("prefactor exponent {0} is not an integer")]
    NonIntegerPower(String),

    #[error("certification failed: residual coefficient {index} is nonzero ({value})")]
    CertificationFailure { index: usize, value: String },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Collision { .. } | Error::CoincidentPositions { .. } => 2,
            Error::NonConvergence { .. } | Error::StepFailure { .. } | Error::NoReturnFound { .. } => 4,
            Error::CertificationFailure { .. } | Error::DegenerateWronskian => 5,
            Error::Io(_) => 1,
            _ => 3,
        }
    }
}
