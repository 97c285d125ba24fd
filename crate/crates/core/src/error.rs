use thiserror::Error;

/// Errors raised by the model, portrait, connection and simulation layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate Riemann data: c_minus = c_plus = {0}")]
    DegenerateData(f64),

    #[error("invalid model configuration: {0}")]
    Config(String),

    #[error("model rejected by assumption checks: {0}")]
    ModelRejected(String),

    #[error("model violates structural assumptions: {0}")]
    ModelViolation(String),

    #[error("flux geometry error: {0}")]
    Geometry(String),

    #[error("no Type II velocity window: v_min = {v_min} >= v_max = {v_max}")]
    NoTypeII { v_min: f64, v_max: f64 },

    #[error("unsupported phase portrait: {0}")]
    UnsupportedPortrait(String),

    #[error("missing critical point {0}")]
    MissingCriticalPoint(String),

    #[error("manifold launch failed: {0}")]
    ManifoldLaunch(String),

    #[error("no connection found for v = {v} in kappa range [{lo:e}, {hi:e}]")]
    ConnectionNotFound { v: f64, lo: f64, hi: f64 },

    #[error("no admissible velocity found for kappa = {0}")]
    VelocityNotFound(f64),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("wave sequence is not compatible by speed: left edge {left}, shock {shock}, right edge {right}")]
    Assembly { left: f64, shock: f64, right: f64 },

    #[error("empty fan has no edge speeds")]
    EmptyFan,

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("numerical instability: {0}")]
    Instability(String),

    #[error("inconclusive simulation: {0}")]
    InconclusiveRun(String),
}

impl Error {
    /// True when the error is caused by the model itself rather than the solver.
    pub fn is_model_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::ModelRejected(_)
                | Error::ModelViolation(_)
                | Error::Geometry(_)
                | Error::NoTypeII { .. }
                | Error::DegenerateData(_)
                | Error::UnsupportedPortrait(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
