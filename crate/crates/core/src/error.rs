use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular (pivot {pivot})")]
    Singular { pivot: usize },
    #[error("no convergence after {iterations} iterations: {what}")]
    NoConvergence { what: String, iterations: usize },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("symbol is not nonnegative (minimum eigenvalue {min_eig:e})")]
    NotNonnegative { min_eig: f64 },
    #[error("symbol has {count} separated zeros")]
    MultipleZeros { count: usize },
    #[error("symbol has no zero (minimum eigenvalue {min_eig:e})")]
    NoZero { min_eig: f64 },
    #[error("zero is degenerate: {count} eigenvalues vanish")]
    DegenerateZero { count: usize },
    #[error("zero order estimate failed: {0}")]
    ZeroOrder(String),
    #[error("eigenvalue branch lost (overlap {overlap:.3})")]
    Tracking { overlap: f64 },
    #[error("construction check failed: {0}")]
    Construction(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
