use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the mapping, planning and mission layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("grid metadata mismatch: {0}")]
    MetaMismatch(String),

    #[error("point ({x:.3}, {y:.3}) lies outside the grid")]
    OutOfBounds { x: f64, y: f64 },

    #[error("sensor at ({x:.3}, {y:.3}) is embedded in an occupied cell")]
    SensorEmbedded { x: f64, y: f64 },

    #[error("degenerate path: {0}")]
    DegeneratePath(String),

    #[error("planning failed: {0}")]
    PlanningFailed(String),

    #[error("map parse error at byte {offset}: {message}")]
    MapParse { offset: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid metrics input: {0}")]
    Metrics(String),

    #[error("scenario file: {0}")]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
