use thiserror::Error;

/// Errors raised by measure algebra, plan construction and verification.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("malformed potential: {0}")]
    MalformedPotential(String),

    #[error("invalid split: theta {theta} outside [{lower}, {upper}]")]
    InvalidSplit { theta: f64, lower: f64, upper: f64 },

    #[error("invalid interval ({lower}, {upper})")]
    InvalidInterval { lower: f64, upper: f64 },

    #[error("invalid tangent (slope {slope}, intercept {intercept}): {reason}")]
    InvalidTangent {
        slope: f64,
        intercept: f64,
        reason: &'static str,
    },

    #[error("inadmissible C = {c}: must be at least {required}")]
    InadmissibleC { c: f64, required: f64 },

    #[error("plan is incomplete (residual {residual})")]
    IncompletePlan { residual: f64 },

    #[error("barycentre function undefined at x = {x}: max-law bound is zero")]
    UndefinedPhi { x: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("plan does not match problem: {0}")]
    PlanMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
