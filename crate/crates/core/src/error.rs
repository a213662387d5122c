use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("element ({row}, {col}) has magnitude {magnitude:e}, not an X state")]
    NonXState { row: usize, col: usize, magnitude: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("1F1 parameter b = {b} lies within pole tolerance of {pole}")]
    PoleParameter { b: Complex64, pole: i64 },

    #[error("1F1 series did not converge after {terms} terms")]
    NoConvergence { terms: usize },

    #[error("1F1 series lost precision: estimated relative error {estimate:e}")]
    PrecisionLoss { estimate: f64 },

    #[error("degenerate parameters (epsilon/gamma = {eps_over_gamma}): {reason}")]
    DegenerateParameters { eps_over_gamma: Complex64, reason: String },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("numeric degradation: {0}")]
    NumericDegradation(String),

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("integration failed at t = {t} (step size {step:e})")]
    IntegrationFailure { t: f64, step: f64 },
}

impl Error {
    pub(crate) fn validation(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field,
            reason: reason.into(),
        }
    }

    /// True for the signals that a caller should answer by switching to the
    /// numerical integrator.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegenerateParameters { .. } | Error::PoleParameter { .. } | Error::PrecisionLoss { .. }
        )
    }
}
