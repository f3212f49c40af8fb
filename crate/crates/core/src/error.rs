use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or inconsistent input data.
    #[error("ingestion error: {0}")]
    Ingestion(String),

    /// Row-level parse failure in an input file.
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: u64,
        message: String,
    },

    #[error("insufficient observations: n = {n}, p = {p}")]
    InsufficientObservations { n: usize, p: usize },

    #[error("insufficient fold size: n = {n}, p = {p}")]
    InsufficientFoldSize { n: usize, p: usize },

    /// Design matrix columns are (numerically) linearly dependent.
    #[error("collinear design (reciprocal condition {rcond:e})")]
    CollinearDesign { rcond: f64 },

    #[error("singular system (reciprocal condition {rcond:e})")]
    Singular { rcond: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("lookup error: {0}")]
    Lookup(String),

    #[error("unsupported sample size {n} (supported range {min}..={max})")]
    UnsupportedSize { n: usize, min: usize, max: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("perfect fit, F undefined")]
    PerfectFit,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
