use thiserror::Error;

use crate::types::ModelKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sigma0_sq must be > 0 (got {0})")]
    NonPositiveVariance(f64),
    #[error("sigma_u must be > 0 (got {0})")]
    NonPositiveNoise(f64),
    #[error("n_periods must be >= 1")]
    ZeroPeriods,
    #[error("p0 must be finite (got {0})")]
    NonFiniteMean(f64),

    #[error("trading coefficient c must be > 0 (got {0})")]
    NonPositiveC(f64),
    #[error("{model} step inadmissible at a = {a}, b = {b}: {reason}")]
    AdmissibilityViolation {
        model: ModelKind,
        a: f64,
        b: f64,
        reason: &'static str,
    },
    #[error("root not bracketed on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    BracketFailure {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("bisection did not reach tolerance within {0} iterations")]
    NoConvergence(usize),
    #[error("period {period}: {source}")]
    AtPeriod {
        period: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid coefficient path: {0}")]
    InvalidCoefficients(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{0} is not supported for model {1}")]
    Unsupported(&'static str, ModelKind),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn at_period(self, period: usize) -> Self {
        Error::AtPeriod {
            period,
            source: Box::new(self),
        }
    }
}
