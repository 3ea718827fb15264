use thiserror::Error;

/// Errors raised by the closed forms, the oracle and the optimizers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NonUnitary: deviation {deviation:e} from unitarity")]
    NonUnitary { deviation: f64 },

    #[error("DimensionMismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("MixedModeUnsupported: mode {mode} carries both displacement and squeezing")]
    MixedModeUnsupported { mode: usize },

    #[error("InvalidCircuitVector: {0}")]
    InvalidCircuitVector(String),

    #[error("InvalidCoefficientVector: {0}")]
    InvalidCoefficientVector(String),

    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),

    #[error("DegenerateSlope: arm {arm} has a vanishing slope")]
    DegenerateSlope { arm: usize },

    #[error("PhaseMismatch: nonzero phase mismatch requires the oracle path")]
    PhaseMismatch,

    #[error("SingularInformation: arm {arm} carries no information")]
    SingularInformation { arm: usize },

    #[error("Infeasible: {0}")]
    Infeasible(String),

    #[error("RegimeViolated: {0}")]
    RegimeViolated(String),
}

impl Error {
    /// Short variant name, used for CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonUnitary { .. } => "NonUnitary",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::MixedModeUnsupported { .. } => "MixedModeUnsupported",
            Error::InvalidCircuitVector(_) => "InvalidCircuitVector",
            Error::InvalidCoefficientVector(_) => "InvalidCoefficientVector",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::DegenerateSlope { .. } => "DegenerateSlope",
            Error::PhaseMismatch => "PhaseMismatch",
            Error::SingularInformation { .. } => "SingularInformation",
            Error::Infeasible(_) => "Infeasible",
            Error::RegimeViolated(_) => "RegimeViolated",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
