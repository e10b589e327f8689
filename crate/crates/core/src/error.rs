use thiserror::Error;

/// Errors produced by the smoothing library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("image must be at least 2x2 for finite differences, got {width}x{height}")]
    DimensionTooSmall { width: usize, height: usize },

    #[error("dimension mismatch: {expected_width}x{expected_height} expected, got {width}x{height}")]
    DimensionMismatch {
        expected_width: usize,
        expected_height: usize,
        width: usize,
        height: usize,
    },

    #[error("data length {len} does not match {width}x{height}")]
    BadDataLength {
        width: usize,
        height: usize,
        len: usize,
    },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("unsupported channel count {0}, expected 1 or 3")]
    UnsupportedChannels(usize),

    #[error("value {value} at index {index} outside unit range [0, 1]")]
    OutOfUnitRange { index: usize, value: f64 },

    #[error("negative value {value} at index {index} in an hdr image")]
    NegativeValue { index: usize, value: f64 },

    #[error("image is not tagged {expected:?}")]
    WrongRangeTag { expected: crate::image::RangeTag },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("signal of length {0} is too short, need at least 2 samples")]
    SignalTooShort(usize),

    #[error("sequence length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("weight field is required in weighted mode")]
    MissingWeights,

    #[error("weight field supplied but mode is original")]
    UnexpectedWeights,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
