//! Error type shared by every module.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("refraction level delta must be positive, got {delta}")]
    NonPositiveDelta { delta: f64 },

    #[error("bounded-variation model needs delta < c (hypothesis H), got c = {c}, delta = {delta}")]
    HypothesisHViolation { c: f64, delta: f64 },

    #[error("Laplace exponent evaluated at a pole, theta = {theta}")]
    DomainError { theta: f64 },

    #[error("discount rate must be positive for this quantity, got q = {q}")]
    NonPositiveQ { q: f64 },

    #[error("mean {mean} does not exceed delta {delta}: ruin is certain")]
    DriftNotDominating { mean: f64, delta: f64 },

    #[error("q = 0 with zero drift: the scale function grows linearly and has no partial-fraction form")]
    DegenerateZeroDrift,

    #[error("roots of the Cramer-Lundberg polynomial are too close (gap {gap:e})")]
    RootSeparationFailure { gap: f64 },

    #[error("Laplace inversion failed at x = {x}: error estimate {estimate:e} exceeds {tolerance:e}")]
    InversionFailure { x: f64, estimate: f64, tolerance: f64 },

    #[error("second derivative of W needs sigma > 0 or a closed form")]
    SecondDerivativeUnavailable,

    #[error("quadrature did not converge: error estimate {estimate:e}, target {tolerance:e}")]
    QuadratureFailure { estimate: f64, tolerance: f64 },

    #[error("simulation scheme {scheme} cannot represent this model: {reason}")]
    SchemeMismatch { scheme: &'static str, reason: String },

    #[error("truncation bias bound {bound:e} exceeds budget {budget:e}")]
    BiasBudgetExceeded { bound: f64, budget: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// True for errors caused by the caller's input rather than by a numerical
    /// routine failing.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::NonPositiveDelta { .. }
                | Error::HypothesisHViolation { .. }
                | Error::NonPositiveQ { .. }
                | Error::DriftNotDominating { .. }
                | Error::SchemeMismatch { .. }
                | Error::Unsupported(_)
                | Error::Config(_)
        )
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::NonPositiveDelta { .. } => "NonPositiveDelta",
            Error::HypothesisHViolation { .. } => "HypothesisHViolation",
            Error::DomainError { .. } => "DomainError",
            Error::NonPositiveQ { .. } => "NonPositiveQ",
            Error::DriftNotDominating { .. } => "DriftNotDominating",
            Error::DegenerateZeroDrift => "DegenerateZeroDrift",
            Error::RootSeparationFailure { .. } => "RootSeparationFailure",
            Error::InversionFailure { .. } => "InversionFailure",
            Error::SecondDerivativeUnavailable => "SecondDerivativeUnavailable",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::SchemeMismatch { .. } => "SchemeMismatch",
            Error::BiasBudgetExceeded { .. } => "BiasBudgetExceeded",
            Error::Unsupported(_) => "Unsupported",
            Error::Config(_) => "Config",
        }
    }
}
