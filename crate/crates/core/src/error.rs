use thiserror::Error;

/// Errors produced by the permutation, Bruhat and KL routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not a permutation of 1..{n}: {reason}")]
    NotAPermutation { n: usize, reason: String },

    #[error("permutation size must be at least 1")]
    EmptyPermutation,

    #[error("permutation size {0} exceeds the supported maximum of {max}", max = crate::perm::MAX_SIZE)]
    TooLarge(usize),

    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("index {index} out of range for size {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("transposition indices must satisfy 1 <= i < j <= n, got ({i}, {j}) with n = {n}")]
    BadTransposition { i: usize, j: usize, n: usize },

    #[error("duplicate value {0} in sequence")]
    Duplicate(i64),

    #[error("pattern of size {pattern} is larger than host of size {host}")]
    PatternTooLarge { pattern: usize, host: usize },

    #[error("{x} is not below {w} in Bruhat order")]
    NotBelow { x: String, w: String },

    #[error("lower and upper bound coincide: {0}")]
    EmptyOpenInterval(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),

    #[error("parameters out of range: {0}")]
    OutOfRange(String),

    #[error("integer overflow in polynomial arithmetic")]
    Overflow,

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
}

pub type Result<T> = std::result::Result<T, Error>;
