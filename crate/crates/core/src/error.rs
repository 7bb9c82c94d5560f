use thiserror::Error;

/// Errors produced by the analytic and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state outside the domain of this closed form: {0}")]
    Domain(String),

    #[error("no periodic solution: {0}")]
    NoSolution(String),

    #[error("no self-sustained pulsation for kappa = {kappa} (requires kappa > 2)")]
    NoPulsation { kappa: f64 },

    #[error("branch n = {n} has no saddle-node bifurcations at kappa = {kappa}")]
    NoFold { n: usize, kappa: f64 },

    #[error("point is not on a branch: residual {residual:e}")]
    Inconsistent { residual: f64 },

    #[error("trajectory stalled on the saddle at t = {t}")]
    Stalled { t: f64 },

    #[error("firing sequence is not periodic: {0}")]
    NotPeriodic(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
