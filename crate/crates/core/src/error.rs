use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("amplitude vector has length {got}, expected {expected}")]
    BadLength { expected: usize, got: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("invalid normalization: sum of squared Schmidt weights is {0}")]
    InvalidNormalization(f64),

    #[error("negative or non-finite parameter: {0}")]
    InvalidParameter(String),

    #[error("register of {0} qubits exceeds the supported maximum of 12")]
    DimensionTooLarge(usize),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix is not Hermitian (max deviation {0})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0})")]
    NotPsd(f64),

    #[error("factor dimensions {dims:?} do not match matrix side {side}")]
    DimsMismatch { dims: Vec<usize>, side: usize },

    #[error("index {index} out of range for {len} factors")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("wrong dimensions: expected {expected}, got {got:?}")]
    WrongDimensions { expected: &'static str, got: Vec<usize> },

    #[error("argument {value} outside domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("columns are not orthonormal (deviation {0})")]
    NotAnIsometry(f64),

    #[error("isometry has {got} columns but the state has rank {rank}")]
    RankMismatch { rank: usize, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("{bound}: precondition violated at indices {indices:?}")]
    PreconditionViolated { bound: &'static str, indices: Vec<usize> },

    #[error("invalid split m={m} for N={n}")]
    InvalidSplit { m: usize, n: usize },

    #[error("exponent beta={beta} outside the regime of {bound} (requires beta >= {min})")]
    BetaOutOfRegime { bound: &'static str, beta: f64, min: f64 },

    #[error("unsupported roof problem: {0}")]
    RoofUnsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown bound id: {0}")]
    UnknownBound(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
