use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum ZennError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("sample too short: need at least {needed} values, got {got}")]
    SampleTooShort { needed: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Diverged { epoch: usize },

    #[error("malformed model document: {0}")]
    Malformed(String),

    #[error("unsupported model format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("model dimensions inconsistent: {0}")]
    ModelDims(String),

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("malformed row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },

    #[error("invalid PPM: {0}")]
    Ppm(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, ZennError>;
