use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("basis is not orthonormal: max deviation {deviation:.3e} exceeds {tol:.3e}")]
    NotOrthonormal { deviation: f64, tol: f64 },

    #[error("matrix is not unitary: max |U^dag U - I| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("covariance is not symmetric: max asymmetry {asymmetry:.3e}")]
    NotSymmetric { asymmetry: f64 },

    #[error("covariance violates the uncertainty bound: min eigenvalue of V + i*Omega is {min_eigenvalue:.3e}")]
    Unphysical { min_eigenvalue: f64 },

    #[error("covariance is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("zero mean field: the mean-field mode is undefined")]
    ZeroMeanField,

    #[error("degenerate measurement: {0}")]
    Degenerate(String),

    #[error("measurement {index} is not a difference measurement (|<w1, v0>| = {overlap:.3e})")]
    NotDifference { index: usize, overlap: f64 },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("duplicate squeezer on mode {0}")]
    DuplicateSqueezer(usize),

    #[error("mode index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
