use thiserror::Error;

use crate::equilibrium::ConvergenceReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Bad input: wrong shapes, out-of-range parameters, non-Hermitian operators.
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("Hilbert dimension {dim} exceeds the configured cap of {cap}")]
    Sizing { dim: usize, cap: usize },

    #[error("Hermitian eigensolver did not converge for a {dim}x{dim} matrix")]
    EigenConvergence { dim: usize },

    #[error("density matrix has eigenvalue {min_eigenvalue:e} below the positivity tolerance")]
    Positivity { min_eigenvalue: f64 },

    #[error("quadrature did not converge: value {value:e}, residual estimate {residual:e} after {intervals} subintervals")]
    Quadrature {
        value: f64,
        residual: f64,
        intervals: usize,
    },

    #[error(
        "finite-difference derivative unreliable: estimate {estimate:e}, error estimate {error:e}"
    )]
    Derivative { estimate: f64, error: f64 },

    #[error("zero-temperature weak-coupling forms disagree: regular {regular}, derivative form {derivative_form}")]
    Consistency { regular: f64, derivative_form: f64 },

    #[error("Fock cutoff did not converge by n_max = {}", report.n_max_used)]
    FockConvergence { report: Box<ConvergenceReport> },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation(_) | Error::Sizing { .. })
    }
}
