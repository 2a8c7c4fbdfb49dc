use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid factor dimensions: {0}")]
    InvalidDims(String),
    #[error("total dimension {0} exceeds the supported maximum of 4096")]
    TooLarge(usize),
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid Pauli letter {0:?}")]
    InvalidLetter(char),
    #[error("site count mismatch: expected {expected}, found {found}")]
    SiteMismatch { expected: usize, found: usize },
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("full Pauli decomposition supports at most {max} sites (got {n}); supply an ansatz set")]
    TooManySites { n: usize, max: usize },
    #[error("letter Y has no image under the duality map (site {site})")]
    UndefinedImage { site: usize },
    #[error("chain needs at least 2 sites (got {0})")]
    ChainTooShort(usize),
    #[error("state does not factorize across the cut (entanglement entropy {entropy:.3e})")]
    NotFactorized { entropy: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
