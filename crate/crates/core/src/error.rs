use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the chain calculus and the numerical routines built on it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no boundary for 0-currents")]
    ZeroDimBoundary,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid current: {0}")]
    InvalidCurrent(String),

    #[error("degenerate cell {cell:?}: volume {volume:e}")]
    DegenerateCell { cell: Vec<usize>, volume: f64 },

    #[error("slice through vertex {vertex} (value {value}, level {level})")]
    SliceThroughVertex { vertex: usize, value: f64, level: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("cell {0} is not part of the complex")]
    MissingCell(String),

    #[error("linear program: {0}")]
    Lp(String),

    #[error("not a cycle-consistent chain: {0}")]
    Imbalance(String),

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("eigensolver: {0}")]
    Eigen(String),

    #[error("degenerate norm ball: {0}")]
    DegenerateBall(String),

    #[error("unknown norm tag {0:?}")]
    UnknownNorm(String),

    #[error("point is not on the support of the current")]
    NotOnSupport,

    #[error("patch too small: ball of radius {radius} leaves the mesh")]
    PatchTooSmall { radius: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
