use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("expected {expected} samples, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("multiplier is not finite at wavenumber {xi}: {value}")]
    NonFiniteMultiplier { xi: f64, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite values in {0}")]
    NonFinite(&'static str),

    #[error("lemma hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("quadrature failed to reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    Quadrature { tolerance: f64, estimate: f64 },

    #[error("trajectory error: {0}")]
    Trajectory(String),

    #[error("(s, r) = ({s}, {r}) is outside every Hölder regime")]
    OutOfRange { s: f64, r: f64 },

    #[error("perturbation family cannot be placed inside B(0, {h})")]
    BallViolation { h: f64 },

    #[error("seam violation: |value| = {value:e} within the edge zone")]
    Seam { value: f64 },

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
