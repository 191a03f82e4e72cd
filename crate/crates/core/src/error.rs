use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("model is not normalizable on the real axis")]
    NonNormalizable,

    #[error("model is not stationary")]
    NotStationary,

    #[error("operation not supported for this model: {0}")]
    UnsupportedModel(&'static str),

    /// The wavefunction is (numerically) zero at `x`; the velocity field has a pole there.
    #[error("wavefunction node near x = {x}")]
    NodeSingularity { x: C64 },

    /// The adaptive step collapsed, which happens when a trajectory runs into a pole.
    #[error("step size underflow at t = {t}, x = {x}")]
    StepUnderflow { t: f64, x: C64 },

    #[error("step limit of {0} reached")]
    MaxSteps(usize),

    #[error("orbit did not close: {0}")]
    NotClosed(String),

    #[error("contour quadrature did not converge: {0}")]
    QuadratureDiverged(String),

    #[error("phase increments could not be resolved near x = {x}")]
    PhaseAmbiguity { x: C64 },
}

pub type Result<T> = std::result::Result<T, Error>;
