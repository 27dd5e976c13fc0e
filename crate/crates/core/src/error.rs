use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("missing column `{0}` in header")]
    MissingColumn(String),

    #[error("parse error at line {line}, column `{column}`: {message}")]
    Parse {
        line: u64,
        column: String,
        message: String,
    },

    #[error("non-positive price at line {line}")]
    NonPositivePrice { line: u64 },

    #[error("timestamp decreases at line {line}")]
    TimestampRegression { line: u64 },

    #[error("empty series")]
    EmptySeries,

    #[error("non-finite log-price at index {index}")]
    NonFiniteLogPrice { index: usize },

    #[error("threshold must be positive and finite, got {0}")]
    InvalidThreshold(f64),

    #[error("invalid grid range: min={min}, max={max}, n={n}")]
    InvalidRange { min: f64, max: f64, n: usize },

    #[error("no events: n_dc + n_os = 0")]
    NoEvents,

    #[error("no completed cycles")]
    EmptyCycles,

    #[error("no overshoot lengths")]
    EmptyLengths,

    #[error("negative or non-finite overshoot length at index {index}")]
    InvalidLength { index: usize },

    #[error("mean overshoot length is zero")]
    ZeroMean,

    #[error("no threshold reaches the target Dc share")]
    NoZoneFound,

    #[error("power-law fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("non-positive frequency at index {0}")]
    NonPositiveFrequency(usize),

    #[error("abscissa has zero variance")]
    DegenerateAbscissa,

    #[error("invalid degrees of freedom: {0}")]
    InvalidDof(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("row is missing fields: {}", .0.join(", "))]
    MissingFields(Vec<&'static str>),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path)
        } else {
            Error::Io { path, source }
        }
    }
}
