use thiserror::Error;

/// Errors raised by the integrators, controller and problem catalogue.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("callback returned a non-finite value at t = {t} (x = {x:?})")]
    Evaluation { t: f64, x: Vec<f64> },

    #[error("step size underflow at t = {t}: h = {h:e}, eps = {eps:e}")]
    StepUnderflow { t: f64, h: f64, eps: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type IntegrateResult<T> = Result<T, IntegrateError>;
