use thiserror::Error;

use crate::family::PeterssonValue;

/// Errors raised by the numerical library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("{a} is not invertible modulo {modulus}")]
    NotInvertible { a: u64, modulus: u64 },

    #[error("modulus {modulus} needs {entries} table entries, over the budget of {cap}")]
    BudgetExceeded { modulus: u64, entries: u64, cap: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0} is out of range")]
    OutOfRange(String),

    /// The truncation cap was hit before the requested tail tolerance.
    /// `best` carries the value summed so far together with its honest tail bound.
    #[error("tail bound {:.3e} exceeds target {target:.3e} at the lattice cap", best.tail_bound)]
    TailNotCertified { best: PeterssonValue, target: f64 },

    #[error("quadrature did not converge: error estimate {error_estimate:.3e} at {nodes} nodes")]
    QuadratureFailure { error_estimate: f64, nodes: usize },

    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
