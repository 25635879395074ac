use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported channel count {0} (expected 1 or 3)")]
    InvalidChannels(usize),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("quality factor {0} outside 1..=100")]
    InvalidQuality(u32),
    #[error("quantization step {0} outside 1..=255")]
    InvalidQuantStep(u32),
    #[error("pipeline has no stages")]
    EmptyPipeline,
    #[error("domain mismatch: expected {expected}, got {got}")]
    DomainMismatch { expected: &'static str, got: &'static str },
    #[error("channel mismatch: expected {expected}, got {got}")]
    ChannelMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("unsupported format: {0}")]
    Unsupported(String),
    #[error("malformed data: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the content or format of an input file.
    pub fn is_format_error(&self) -> bool {
        matches!(self, Error::Unsupported(_) | Error::Malformed(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
