use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground size {m} exceeds the configured limit {limit}")]
    DimensionOverflow { m: u32, limit: u32 },

    #[error("subset mask {mask:#b} uses elements above {m}")]
    MaskOutOfRange { mask: u64, m: u32 },

    #[error("ground sizes differ: {left} vs {right}")]
    DimensionMismatch { left: u32, right: u32 },

    #[error("sections need a ground size of at least 2, got {0}")]
    SectionTooSmall(u32),

    #[error("invalid window [{lo}, {hi}]")]
    InvalidWindow { lo: u32, hi: u32 },

    #[error("bias must lie strictly between 0 and 1, got {0}")]
    InvalidBias(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invariant violated at iteration {iteration}: {detail}")]
    Invariant { iteration: usize, detail: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
