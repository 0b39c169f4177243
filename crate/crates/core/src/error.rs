use thiserror::Error;

/// Errors raised by the numerical routines and the experiment driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {x} lies on a branch breakpoint; derivative is two-valued there")]
    BranchBoundary { x: f64 },

    #[error("root finding did not bracket a solution within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("grid of {samples} samples does not refine a partition into {bins} bins")]
    GridMismatch { samples: usize, bins: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("adaptive quadrature exhausted its budget of {panels} panels before reaching tolerance")]
    QuadratureFailure { panels: usize },

    #[error("matrix is already weighted")]
    AlreadyWeighted,

    #[error("mass drift {drift:e} at step {step} exceeds tolerance")]
    MassDrift { step: usize, drift: f64 },

    #[error("trial vector {trial} vanished after projection to zero mean")]
    DegenerateVector { trial: usize },

    #[error("incompatible density representations: {0}")]
    IncompatibleRepresentations(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad input rather than a failed numerical invariant.
    pub fn is_usage_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::InvalidParameter(_) | Error::InvalidMap(_) | Error::Io(_)
        )
    }

    /// Process exit status: 2 for usage and configuration problems, 1 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        if self.is_usage_error() {
            2
        } else {
            1
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
