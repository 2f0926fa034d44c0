use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grids are incompatible: {0}")]
    GridIncompatible(String),
    #[error("amplitude is identically zero")]
    DegenerateState,
    #[error("amplitude is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("resolvent pole on the real axis at omega = {0} eV")]
    Singularity(f64),
    #[error("photon-number bookkeeping: {0}")]
    Bookkeeping(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("problem too large for the oracle: {0}")]
    Size(String),
    #[error("protocol {target} does not match the direct pathway value (residual {residual:.3e})")]
    ProtocolMismatch { target: String, residual: f64 },
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
