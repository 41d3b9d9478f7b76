use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty block")]
    EmptyBlock,
    #[error("empty dilation set")]
    EmptySet,
    #[error("all blocks empty over the requested j range")]
    AllBlocksEmpty,
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("sequence is not monotone decreasing at index {index}")]
    NotMonotone { index: usize },
    #[error("grid must start at 0 (found {0})")]
    GridNotAtOrigin(f64),
    #[error("grid is not strictly increasing at node {0}")]
    GridNotIncreasing(usize),
    #[error("non-finite sample at node {0}")]
    NonFinite(usize),
    #[error("Hölder order insufficient: alpha = {alpha} must be below the Hölder exponent {hoelder}")]
    HoelderOrderInsufficient { alpha: f64, hoelder: f64 },
    #[error("band out of range: band {band} needs frequency {needed} but the grid Nyquist limit is {nyquist}")]
    BandOutOfRange { band: i32, needed: f64, nyquist: f64 },
    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("io: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
