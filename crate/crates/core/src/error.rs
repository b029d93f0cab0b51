use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },

    #[error("Hamiltonian of dimension {dim} exceeds the {limit}-entry guard")]
    DimensionOverflow { dim: usize, limit: usize },

    #[error("dressed-state assignment ambiguous for {label}: best overlap {overlap:.4}")]
    AssignmentAmbiguity { label: String, overlap: f64 },

    #[error("trajectory exceeded {limit} jumps")]
    TrajectoryTooLong { limit: usize },
}

pub type Result<T> = std::result::Result<T, ThermoError>;

pub(crate) fn domain(what: &'static str, value: f64) -> ThermoError {
    ThermoError::Domain { what, value }
}
