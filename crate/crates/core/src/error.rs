use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("uniform variate {0} outside the open interval (0, 1)")]
    UniformOutOfRange(f64),

    #[error("jump of size {size} at t = {time} violates ΔM > -1")]
    JumpTooSmall { time: f64, size: f64 },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid control: {0}")]
    InvalidControl(String),

    #[error("time {t} lies beyond the path horizon {horizon}")]
    BeyondHorizon { t: f64, horizon: f64 },

    #[error("epsilon {0} outside (0, 1)")]
    EpsilonOutOfRange(f64),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid condition spec: {0}")]
    InvalidCondition(String),

    #[error("model '{model}' does not support {what}")]
    UnsupportedModel { model: String, what: String },

    #[error("quadrature did not converge: error bound {achieved:e} after {intervals} intervals")]
    QuadratureNotConverged { achieved: f64, intervals: usize },

    #[error("integrand returned a non-finite value at x = {0}")]
    NonFiniteIntegrand(f64),

    #[error("{nonfinite} of {total} Monte Carlo samples were non-finite")]
    TooManyNonFinite { nonfinite: usize, total: usize },

    #[error("invalid Monte Carlo request: {0}")]
    InvalidSampling(String),

    #[error("invalid truncation levels: {0}")]
    InvalidLevels(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
