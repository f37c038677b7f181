use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("spectral coefficients violate Hermitian symmetry (asymmetry {asymmetry:.3e})")]
    Asymmetric { asymmetry: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("numerical overflow in {0}")]
    Overflow(&'static str),
    #[error("ratio undefined: {0}")]
    UndefinedRatio(&'static str),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("fixed-point iteration did not contract after {iterations} iterations (last update {last_update:.3e})")]
    NonContraction { iterations: usize, last_update: f64 },
    #[error("solution blew up at step {step}")]
    BlowUp { step: u64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
