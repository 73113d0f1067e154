use std::io;

use thiserror::Error;

use crate::tensor::FormatTag;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sensor geometry {width}x{height}")]
    InvalidGeometry { width: u32, height: u32 },

    #[error("invalid time window [{start}, {end}] with {bins} bins")]
    InvalidWindow { start: u64, end: u64, bins: u32 },

    #[error("timestamp {t} outside window [{start}, {end}]")]
    OutOfWindow { t: u64, start: u64, end: u64 },

    #[error("event {index} at ({x}, {y}) outside {width}x{height} sensor")]
    OutOfBounds {
        index: usize,
        x: u32,
        y: u32,
        width: u32,
        height: u32,
    },

    #[error("event {index}: timestamp {t} precedes previous timestamp {prev}")]
    NonMonotonic { index: usize, t: u64, prev: u64 },

    #[error("{format} requires at least {min} bins, got {bins}")]
    TooFewBins {
        format: FormatTag,
        min: u32,
        bins: u32,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tensor mismatch: {0}")]
    TensorMismatch(String),

    #[error("codec error: {0}")]
    Codec(String),

    #[error("corrupt buffer: {0}")]
    Corrupt(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("empty corpus: no non-empty chunks")]
    EmptyCorpus,

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
