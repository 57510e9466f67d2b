use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("operation requires identical pendula (equal masses, lengths and damping)")]
    NotIdentical,

    #[error("inertial factor vanishes at this state")]
    DegenerateState,

    #[error("integrator step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("integrator exceeded the step budget at t = {t}")]
    MaxSteps { t: f64 },

    #[error("leading coefficient is zero")]
    LeadingCoefficientZero,

    #[error("coefficient a{index} is not strictly positive")]
    NonPositiveCoefficient { index: usize },

    #[error("zero pivot in the Routh-Hurwitz chain")]
    ZeroPivot,

    #[error("eta = {eta} exceeds 1: this branch is not analyzed")]
    UnsupportedBranch { eta: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("only {found} usable peaks, need at least {needed}")]
    TooFewPeaks { found: usize, needed: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParam {
        field,
        reason: reason.into(),
    }
}
