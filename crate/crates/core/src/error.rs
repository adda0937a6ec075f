use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("wrong point count: expected {expected}, found {found}")]
    WrongPointCount { expected: usize, found: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("duplicate point at index {0}")]
    DuplicatePoint(usize),
    #[error("unsupported configuration label: {0}")]
    UnsupportedLabel(String),
    #[error("cannot parse label {0:?}")]
    BadLabel(String),
    #[error("configuration is not a product with a simplex factor: {0}")]
    NotProduct(String),
    #[error("malformed simplex: {0}")]
    MalformedSimplex(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("k-vector entries must be positive")]
    ZeroInKVector,
    #[error("coloring uses {coloring} colors but the seed has {seed} simplex vertices")]
    MismatchedColors { coloring: usize, seed: usize },
    #[error("invalid coloring: {0}")]
    InvalidColoring(String),
    #[error("triangulation of the second factor is not face-to-face: {0}")]
    NotFaceToFace(String),
    #[error("m = {m} exceeds n = {n}")]
    TooManyColors { m: usize, n: usize },
    #[error("guard exceeded: {what} = {value} > {limit}")]
    GuardExceeded { what: &'static str, value: u128, limit: u128 },
    #[error("cell is not fine mixed: {0}")]
    NonFineCell(String),
    #[error("base configuration must be the unit square, found {0}")]
    BaseNotSquare(String),
    #[error("dimension {0} out of range")]
    DimensionOutOfRange(usize),
    #[error("seed construction failed verification: {0}")]
    SeedVerification(String),
    #[error("invalid pipeline spec: {0}")]
    InvalidSpec(String),
    #[error("invalid file: {0}")]
    Format(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
