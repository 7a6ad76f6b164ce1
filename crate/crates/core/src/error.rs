use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input component")]
    NonFiniteInput,
    #[error("negative magnitude {0}")]
    NegativeMagnitude(f32),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("layout string `{0}` is not of the form s,e,m-p-t[/bias]")]
    LayoutParse(String),
    #[error("sample domain is empty")]
    EmptyDomain,
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("argument {0} outside the domain of acos")]
    DomainError(f64),
    #[error("stream lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("bad magic bytes {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported stream version {0}")]
    UnsupportedVersion(u8),
    #[error("bad layout in stream header: {0}")]
    BadLayout(String),
    #[error("stream truncated: expected {expected} bytes, found {found}")]
    TruncatedStream { expected: u64, found: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
