use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("file not found: {0}")]
    NotFound(PathBuf),
    #[error("malformed image data: {0}")]
    Malformed(String),
    #[error("unsupported bit depth: {0} (only 8 bits per channel are supported)")]
    UnsupportedBitDepth(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("dimension mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    DimensionMismatch {
        left_w: u32,
        left_h: u32,
        right_w: u32,
        right_h: u32,
    },
    #[error("invalid dimensions {0}x{1}")]
    InvalidDimensions(u32, u32),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("image has no pixel with alpha >= {0}")]
    FullyTransparent(u8),
}

impl Error {
    pub(crate) fn mismatch(a: (u32, u32), b: (u32, u32)) -> Self {
        Error::DimensionMismatch {
            left_w: a.0,
            left_h: a.1,
            right_w: b.0,
            right_h: b.1,
        }
    }
}
