use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("cube at level {0} is a grid leaf and has no dyadic children")]
    Leaf(u32),
    #[error("degenerate weight: {0}")]
    DegenerateWeight(String),
    #[error("bloom weight is undefined for m = 0")]
    UndefinedBloom,
    #[error("ellipticity violated: coefficient {value} at cell {cell}")]
    Ellipticity { cell: usize, value: f64 },
    #[error("spectrum error: {0}")]
    Spectrum(String),
    #[error("support escapes the top cube: {0}")]
    Support(String),
    #[error("every sample was skipped")]
    EmptySample,
    #[error("family failed the sparseness check: {0}")]
    UnverifiedFamily(String),
    #[error("non-finite value in report: {0}")]
    NonFinite(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
