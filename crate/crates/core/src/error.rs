use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("group closure exceeded {limit} elements")]
    GroupTooLarge { limit: usize },
    #[error("the origin has no fundamental-domain representative")]
    OriginUnclassifiable,
    #[error("need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("resonant mode (m = {m}, alpha = {alpha}) has no supported closed form")]
    UnsupportedResonance { m: u32, alpha: f64 },
    #[error("point {0:?} lies outside the open sector")]
    OutsideDomain(Vec<f64>),
    #[error("quadrature did not converge: value {value}, error estimate {err_est}")]
    QuadratureFailure { value: f64, err_est: f64 },
    #[error("integrand is not integrable: {0}")]
    NonIntegrable(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("requested time {t} is past the blow-up time {t_star}")]
    PastBlowup { t: f64, t_star: f64 },
    #[error("invalid cutoff: {0}")]
    InvalidCutoff(String),
}

pub type Result<T> = std::result::Result<T, Error>;
