use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not square: matrix is {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("not Hermitian: max asymmetry {asymmetry:e} exceeds tolerance {tol:e}")]
    NotHermitian { asymmetry: f64, tol: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("enumeration of {count} subsets exceeds the cap of {cap}; use Monte Carlo mode instead")]
    EnumerationCap { count: u128, cap: u128 },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
