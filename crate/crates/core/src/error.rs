use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid momentum grid: {0}")]
    InvalidGrid(String),
    #[error("degenerate collapse: post-event norm {norm:e} is below the floor")]
    DegenerateCollapse { norm: f64 },
    #[error("empty half-space: restricted mass {mass:e} is too small")]
    EmptyHalf { mass: f64 },
    #[error("zero likelihood at p = {momentum}: both hypothesis densities vanish")]
    ZeroLikelihood { momentum: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
