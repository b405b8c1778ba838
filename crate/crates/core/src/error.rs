use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} degrees of freedom, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite {what}")]
    NonFinite { what: &'static str },

    #[error("adaptive step size underflow at t = {time}")]
    StepUnderflow { time: f64 },

    #[error("state has zero norm")]
    ZeroState,

    #[error("grid specifications differ")]
    GridMismatch,

    #[error("envelope half-width {half_width} does not fit in box [{q_min}, {q_max})")]
    EnvelopeTooWide { half_width: f64, q_min: f64, q_max: f64 },

    #[error("operation supports one degree of freedom only, found {found}")]
    UnsupportedDof { found: usize },

    #[error("split-step scheme needs a separable Hamiltonian (pure q or pure p monomials)")]
    SchemeMismatch,

    #[error("generator is not Hermitian: {0}")]
    NonHermitian(String),

    #[error("numerical blow-up in {module} at t = {time}")]
    NumericalFailure { module: &'static str, time: f64 },

    #[error("time grid is not uniformly sampled")]
    NonUniformSampling,

    #[error("envelope is not centered: <q> = {q}, <p> = {p}")]
    UncenteredEnvelope { q: f64, p: f64 },

    #[error("unsupported Hamiltonian form: {0}")]
    UnsupportedForm(String),

    #[error("need at least {needed} samples, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("invalid loop: {0}")]
    InvalidLoop(String),

    #[error("trajectory escaped at t = {time}")]
    Escape { time: f64 },

    #[error("fit window contains fewer than two usable points")]
    EmptyWindow,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
