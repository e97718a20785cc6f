use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must have dimension >= 1")]
    EmptyMatrix,

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |H_ij - conj(H_ji)| = {max_deviation:e})")]
    NotHermitian { max_deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("step limit of {max_steps} reached at l = {l:e} before l_max = {l_max:e}")]
    StepLimitExceeded { max_steps: usize, l: f64, l_max: f64 },

    #[error("error control failed at l = {l:e}: step size {step:e} below minimum")]
    ToleranceFailure { l: f64, step: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("photon number {n} outside the allowed range [{min}, {max}]")]
    Index { n: usize, min: usize, max: usize },

    #[error("Ramsey phases violate theta - phi = pi (mod 2 pi): theta = {theta}, phi = {phi}")]
    Phase { theta: f64, phi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
