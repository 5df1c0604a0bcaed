use thiserror::Error;

/// Errors raised while building or analysing signal sets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("extension degree m={0} is outside 1..=8")]
    DegreeOutOfRange(u32),
    #[error("polynomial {poly:#x} is not a primitive polynomial of degree {m}")]
    NotPrimitive { m: u32, poly: u32 },
    #[error("value {value} is not an element of GF(2^{m})")]
    NotAnElement { value: u32, m: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("invalid code parameters: {0}")]
    CodeParams(String),
    #[error("message symbol {symbol} at position {position} is not below {alphabet}")]
    SymbolOutOfRange {
        symbol: u32,
        position: usize,
        alphabet: u32,
    },
    #[error("{0} must be a power of two")]
    NotPowerOfTwo(&'static str),
    #[error("invalid point set: {0}")]
    PointSet(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("signal set has {size} blocks, above the pair-sweep cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("index {index} out of range for a set of {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
