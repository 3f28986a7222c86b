use thiserror::Error;

/// Errors raised by toolkit operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("samples per axis must be a power of two, got {0}")]
    NotPowerOfTwo(usize),
    #[error("unsupported dimension {0} (only 1 and 2 are supported)")]
    UnsupportedDimension(usize),
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("kernel leakage {leakage:.3e} exceeds bound {bound:.3e} at t = {t}")]
    Leakage { t: f64, leakage: f64, bound: f64 },
    #[error("time grid reaches only t = {t_max}, cube side {side} is not covered")]
    TimeGridTooShort { t_max: f64, side: f64 },
    #[error("empty test family")]
    EmptyFamily,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
