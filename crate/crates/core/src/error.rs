use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("atom-pair state cannot be normalised: all amplitudes are zero")]
    Unnormalizable,

    #[error("invalid atom-pair state: {0}")]
    InvalidState(String),

    #[error("invalid cavity state: {0}")]
    InvalidCavityState(String),

    #[error("above threshold: p1 exceeds p2 + kappa/2 by {margin:.6e} 1/s")]
    AboveThreshold { margin: f64 },

    #[error("invalid Fock dimension {0} (need at least 2)")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("effective temperature diverges (n_th -> 0 with n_ss > 0)")]
    DivergentTemperature,

    #[error("trace drifted by {drift:.3e} at t = {time:.6e} s")]
    TraceDrift { time: f64, drift: f64 },

    #[error(
        "Fock truncation too small: tail mass {tail_mass:.3e} exceeds {tolerance:.1e} at dim {dim}; \
         rerun with a larger dimension"
    )]
    TruncationTooSmall { dim: usize, tail_mass: f64, tolerance: f64 },

    #[error("required Fock dimension {required} exceeds the budget of {budget}")]
    DimensionBudget { required: usize, budget: usize },

    #[error("integrator step size underflow at t = {0:.6e} s")]
    StepSizeUnderflow(f64),

    #[error(
        "steady state not reached: residual {residual:.3e} after {steps} steps \
         (spectral gap estimate {gap_estimate:.3e} 1/s)"
    )]
    NoConvergence { residual: f64, steps: usize, gap_estimate: f64 },

    #[error("linear solve failed: {0}")]
    Singular(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error stems from the inputs (configuration, parameters,
    /// files) rather than from a numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Unnormalizable
                | Error::InvalidState(_)
                | Error::InvalidCavityState(_)
                | Error::InvalidDimension(_)
                | Error::DimensionMismatch { .. }
                | Error::InvalidParameter(_)
                | Error::DimensionBudget { .. }
                | Error::Config(_)
                | Error::Io(_)
        )
    }
}
