//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by evaluation, quadrature and solver routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Gamma function evaluated at a nonpositive integer.
    #[error("gamma pole at nonpositive integer argument {0}")]
    GammaPole(f64),

    /// Argument outside the supported domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Requested accuracy cannot be met because of floating-point cancellation.
    #[error("precision loss: {context} (estimated cancellation ~1e{lost_digits:.0})")]
    PrecisionLoss { context: String, lost_digits: f64 },

    /// A power series did not satisfy its tail criterion within the term budget.
    #[error("series budget of {budget} terms exhausted ({context})")]
    SeriesBudget { budget: usize, context: String },

    /// Linear solve too close to the spectrum: residual check failed.
    #[error("resolvent solve near spectrum: scaled residual {residual:.3e} > {tolerance:.3e}")]
    NearSpectrum { residual: f64, tolerance: f64 },

    /// The Bromwich contour cannot be placed to the right of the spectrum-induced
    /// singularities without destroying the quadrature conditioning.
    #[error("Laplace-inversion contour obstructed: {0}")]
    ContourObstructed(String),

    /// A theorem hypothesis required by the operation does not hold.
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),

    /// The semi-infinite tail cannot be brought below the requested tolerance.
    #[error("tail tolerance {requested:.3e} unreachable: {detail}")]
    TailTolerance { requested: f64, detail: String },

    /// Trajectory is not smooth enough for the requested derivative order.
    #[error("insufficient smoothness: interpolation order {order} < required {required}")]
    InsufficientSmoothness { order: usize, required: usize },

    /// Commutation hypothesis of the first-order Cauchy path fails.
    #[error("commutation hypothesis violated: relative commutator norm {0:.3e}")]
    Commutation(f64),

    /// Malformed input (matrices, grids, parameter ranges).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// File or format problem while reading external inputs.
    #[error("parse error: {0}")]
    Parse(String),

    /// I/O failure.
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
