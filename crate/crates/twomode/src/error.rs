use thiserror::Error;

/// Errors shared across the crate.
///
/// Numerical tolerances referenced in the messages are the crate-wide
/// constants documented on [`crate::state::CovarianceMatrix`].
#[derive(Debug, Error)]
pub enum Error {
    /// Input matrix cannot be a covariance matrix at all (wrong shape,
    /// asymmetric beyond construction tolerance, empty).
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    /// Operands have incompatible mode counts / dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The operation requires a physical state and the input is not one.
    #[error("unphysical input: {0}")]
    UnphysicalInput(String),

    /// Parameter outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    DomainError(String),

    /// The closed form only applies to symmetric two-mode states (equal
    /// single-mode determinants) and the input is not symmetric.
    #[error("state is not symmetric: a = {a}, b = {b} differ beyond {tol}")]
    NotSymmetric { a: f64, b: f64, tol: f64 },

    /// Scalar invariants extracted from the matrix contradict each other
    /// beyond what rounding can explain (noisy or inconsistent data).
    #[error("inconsistent invariants: {0}")]
    InconsistentInvariants(String),

    /// An eigenvalue pairing or factorization step lost too much precision
    /// to produce a trustworthy answer.
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    /// Sample set too small or rank-deficient for covariance estimation.
    #[error("degenerate sample set: {0}")]
    DegenerateSamples(String),

    /// cmv1 parse failure; `line` is 1-based within the input file.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
