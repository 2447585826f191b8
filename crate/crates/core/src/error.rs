use thiserror::Error;

pub type Result<T> = std::result::Result<T, GmeError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GmeError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("function is not in K: value {value} at node {index} lies outside [0, 1]")]
    NotInK { index: usize, value: f64 },

    #[error("invalid bracket [{lo}, {hi}]: f(lo) = {f_lo} and f(hi) = {f_hi} have the same sign")]
    InvalidBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("root finder did not converge after {iterations} iterations (best estimate {best})")]
    RootNotConverged { best: f64, iterations: usize },

    #[error(
        "beta = {beta} is not below the contraction threshold {threshold}; \
         convergence is not guaranteed (enable allow_uncertified to try anyway)"
    )]
    ContractionNotGuaranteed { beta: f64, threshold: f64 },

    #[error(
        "fixed-point iteration did not converge in {iterations} iterations (residual {residual:e})"
    )]
    NotConverged { iterations: usize, residual: f64 },

    #[error("shooting failed: {0}")]
    Shooting(String),

    #[error("{quantity} = {value} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain {
        quantity: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("unsupported approximation order {0} (expected 0 or 1)")]
    UnsupportedOrder(u32),

    #[error("could not bracket a root: {0}")]
    BracketingFailed(String),
}
