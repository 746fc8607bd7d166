use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{channel} channel value {value} outside [0, 1]")]
    ChannelOutOfRange { channel: &'static str, value: f64 },

    #[error("invalid HSL color: {0}")]
    InvalidHsl(String),

    #[error("sample weight must be at least 1")]
    ZeroWeight,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("requested {k} clusters but only {distinct} distinct colors are available")]
    TooFewColors { k: usize, distinct: usize },

    #[error("no samples to cluster")]
    EmptyInput,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("unsupported bit depth: {0}")]
    UnsupportedBitDepth(String),

    #[error("malformed image file: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by reading, writing or decoding files.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io(_)
                | Error::Json(_)
                | Error::UnsupportedFormat(_)
                | Error::UnsupportedBitDepth(_)
                | Error::Malformed(_)
        )
    }
}
