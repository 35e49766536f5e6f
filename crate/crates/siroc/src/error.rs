//! Crate-wide error type.

/// Errors produced by raster I/O, validation, and the detection pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// Malformed or unsupported file content (bad sidecar, truncated payload,
    /// undecodable PNG/TIFF, unsupported sample type).
    #[error("format error: {0}")]
    Format(String),
    /// Dimension or band-count disagreement between inputs.
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    /// Input violates a domain invariant (non-finite values, nodata pixels,
    /// out-of-range band index, degenerate neighborhood).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Synthetic object placement exhausted its retry budget.
    #[error("object placement failed: {0}")]
    Placement(String),
}

pub type Result<T> = std::result::Result<T, Error>;
