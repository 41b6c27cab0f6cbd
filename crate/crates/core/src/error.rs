use thiserror::Error;

/// Errors raised by the numerical kernels, the analytic string model and the
/// report layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not symmetric: max |A - A^T| = {asymmetry:e} exceeds {tolerance:e}")]
    NotSymmetric { asymmetry: f64, tolerance: f64 },

    #[error("{algorithm} did not converge within {sweeps} sweeps")]
    NoConvergence {
        algorithm: &'static str,
        sweeps: usize,
    },

    #[error("all columns are numerically null")]
    EmptySpan,

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error(
        "operator is not nonnegative: smallest eigenvalue {min_eigenvalue:e} below -{tolerance:e}"
    )]
    NotNonnegative { min_eigenvalue: f64, tolerance: f64 },

    #[error("operator is singular; {0} requires a positive definite operator")]
    SingularOperator(&'static str),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("need {needed} reference eigenvalues, only {available} available")]
    InsufficientEigenvalues { needed: usize, available: usize },

    #[error("gap parameter {gamma} must exceed the Rayleigh quotient {mu}")]
    GammaNotAboveMu { gamma: f64, mu: f64 },

    #[error("no bracket for root {index} of the secular equation: {reason}")]
    BracketFailure { index: usize, reason: String },

    #[error("mesh size {mesh} is below the minimum of {minimum}")]
    MeshTooCoarse { mesh: usize, minimum: usize },

    #[error("invalid matrix entries: {0}")]
    NonFinite(String),

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn dims(
        context: &'static str,
        expected: impl ToString,
        found: impl ToString,
    ) -> Self {
        Error::DimensionMismatch {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
