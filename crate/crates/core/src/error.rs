use thiserror::Error;

/// Errors shared across the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A mixture component center fell outside the unit hypercube.
    #[error("component center {index} lies outside the unit hypercube: {coords:?}")]
    CenterOutOfBounds { index: usize, coords: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Training data contains only one label; the caller decides the fallback.
    #[error("training data contains a single class")]
    SingleClassData,

    #[error("solver did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("empty reference set")]
    EmptyReference,

    /// No training points fell inside the locality sphere.
    #[error("no training points inside the locality")]
    EmptyLocalData,

    #[error("trajectory too short: need {needed} points, have {len}")]
    TrajectoryTooShort { needed: usize, len: usize },

    #[error("malformed {what}: {detail}")]
    MalformedData { what: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
