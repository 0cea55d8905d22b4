use thiserror::Error;

/// Errors produced by the physics, rate-model, collision and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: `{field}` {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("degenerate lattice: interference contrast vanishes at alpha = {alpha} rad")]
    DegenerateLattice { alpha: f64 },

    #[error("cross section diverges at zero relative velocity")]
    CrossSectionOverflow,

    #[error("rate matrix has {dimension} stationary states; steady state is ambiguous")]
    AmbiguousSteadyState { dimension: usize },

    #[error("population leaks past the truncation: p(n_max) = {leak:e} exceeds {limit:e}")]
    TruncationLeak { leak: f64, limit: f64 },

    #[error("integration failed at t = {t:e} s: {reason}")]
    Integration { t: f64, reason: String },

    #[error("time step {dt:e} s too large: per-pair collision probability bound {p_max:.3} exceeds 0.1")]
    TimeStepTooLarge { dt: f64, p_max: f64 },

    #[error("sampled collision rate {observed:e} exceeds the majorant {majorant:e}")]
    MajorantOverflow { observed: f64, majorant: f64 },

    #[error("exponential fit failed: {reason} (residual rms {residual:e})")]
    Fit { reason: String, residual: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field,
        reason: reason.into(),
    }
}
