use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MagheatError {
    #[error("unsupported dimension {0}; only d = 2 and d = 3 are implemented")]
    UnsupportedDimension(usize),

    #[error("unknown field preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("operation requires d = {expected}, field has d = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty sample set")]
    EmptySamples,

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("minimizing angular mode m = {mode} sits on the boundary of the range ±{range}")]
    ModeRangeTooSmall { mode: i64, range: i64 },

    #[error("initial datum is not in the weighted space: {0}")]
    NotWeighted(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("evaluation point ρ = {rho} lies inside the shrinking ball of radius {limit}")]
    InsideCore { rho: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, MagheatError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> MagheatError {
    MagheatError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
