use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unitary: max |U†U - I| = {residual:e}")]
    NotUnitary { residual: f64 },

    #[error("reflectivity {0} outside [0, 1]")]
    Reflectivity(f64),

    #[error("bias delta {0} outside [0, 1]")]
    Delta(f64),

    #[error("invalid beam-splitter ports ({0}, {1}) for {2} modes")]
    Ports(usize, usize, usize),

    #[error("cannot place {particles} particles in zero modes")]
    NoModes { particles: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("particle number mismatch: {0} in, {1} out")]
    ParticleNumber(usize, usize),

    #[error("invalid event: {0}")]
    Event(String),

    #[error("invalid experiment configuration: {0}")]
    Config(String),

    #[error("sample count must be at least 1")]
    NoSamples,

    #[error("empty delta grid")]
    EmptyGrid,

    #[error("probability {value} outside [{lo}, {hi}]")]
    Probability { value: f64, lo: f64, hi: f64 },

    #[error("exact joint distribution is only available at delta = 0 (got {0})")]
    ExactRequiresZeroDelta(f64),
}
