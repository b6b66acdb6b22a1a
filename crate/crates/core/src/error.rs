use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("x = {x} outside the profile domain [0, {length}]")]
    OutsideDomain { x: f64, length: f64 },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("empty cross-section spectrum")]
    EmptySpectrum,

    #[error("invalid cross-section spectrum: {0}")]
    Spectrum(String),

    #[error("lambda1 = {0} must be negative")]
    NonNegativeLambda1(f64),

    #[error("gamma = {gamma} outside the admissible window ({lo}, {hi})")]
    GammaOutsideWindow { gamma: f64, lo: f64, hi: f64 },

    #[error("spectrum truncation too short: roots needed up to |Re z| = {needed}, covered up to {covered}")]
    TruncationTooShort { needed: f64, covered: f64 },

    #[error("delta0 supremum {0} is not positive")]
    Delta0Inconsistent(f64),

    #[error("eigensolver failed to converge for mode {mode}")]
    Eigensolver { mode: usize },

    #[error("unsupported norm order s = {0} (only 0, 1, 2)")]
    UnsupportedOrder(f64),

    #[error("invalid norm request: {0}")]
    NormRequest(String),

    #[error("field shape {got:?} does not match discretization {expected:?}")]
    Shape {
        got: (usize, usize),
        expected: (usize, usize),
    },

    #[error("non-finite value at step {step}")]
    NonFinite { step: usize },

    #[error("dense oracle refused: size {size} exceeds cap {cap}")]
    OracleTooLarge { size: usize, cap: usize },

    #[error("grid mismatch between operators")]
    GridMismatch,

    #[error("{0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Errors caused by bad input rather than by a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Geometry(_)
                | Error::OutsideDomain { .. }
                | Error::Grid(_)
                | Error::EmptySpectrum
                | Error::Spectrum(_)
                | Error::NonNegativeLambda1(_)
                | Error::GammaOutsideWindow { .. }
                | Error::TruncationTooShort { .. }
                | Error::UnsupportedOrder(_)
                | Error::NormRequest(_)
                | Error::Shape { .. }
                | Error::Config(_)
        )
    }
}
