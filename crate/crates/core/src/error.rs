use thiserror::Error;

/// Errors produced by the encoders, decoders and their supporting kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input contains a non-finite coordinate")]
    NonFiniteInput,
    #[error("multiset must contain at least one element")]
    EmptyInput,
    #[error("{len} elements exceed capacity {capacity}")]
    CapacityExceeded { len: usize, capacity: usize },
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expected exactly {expected} elements, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("latent size overflows for {what}")]
    SizeOverflow { what: String },
    #[error("root solver did not converge within {max_iter} iterations")]
    NoConvergence { max_iter: usize },
    #[error("latent has non-real parameterized roots (imaginary part {max_imag:e})")]
    NonRealRoots { max_imag: f64 },
    #[error("coordinate recovery unstable at delta {delta:e} (deviation {deviation:e})")]
    UnstableDelta { delta: f64, deviation: f64 },
    #[error("decode verification failed after {attempts} attempts (residual {residual:e})")]
    DecodeVerificationFailed { residual: f64, attempts: usize },
    #[error("element {index} lies outside the domain box")]
    ElementOutsideBox { index: usize },
    #[error("sentinel removal left {count} element(s) outside the domain box")]
    SentinelLeak { count: usize },
    #[error("identifier collision between distinct elements")]
    IdentifierCollision,
    #[error("node labels are not pairwise distinct")]
    NotIdentifiable,
    #[error("not a permutation of 0..{n}")]
    BadPermutation { n: usize },
    #[error("brute-force congruence refused for N = {n} (limit 8)")]
    TooLargeForFallback { n: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
