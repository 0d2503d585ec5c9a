use thiserror::Error;

/// Errors surfaced by the library. Numerical routines report divergence
/// through values (infinity markers, route tags), never through `Err`.
#[derive(Debug, Error)]
pub enum Error {
    #[error("gamma/digamma pole at non-positive integer x = {0}")]
    GammaPole(f64),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("unsupported transform: {0}")]
    UnsupportedTransform(String),
    #[error("star samples live on different grids")]
    GridMismatch,
    #[error("sample too sparse: {0}")]
    Resolution(String),
    #[error("ill-conditioned: {0}")]
    Conditioning(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
