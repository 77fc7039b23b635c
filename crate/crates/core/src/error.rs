use thiserror::Error;

/// Failures raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point lies outside the domain")]
    OutsideDomain,

    #[error("point is not on the boundary of the domain")]
    NotOnBoundary,

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("basis of size {size} is too small, need at least {needed}")]
    BasisTooSmall { size: usize, needed: usize },

    #[error("no closed-form kernel for this domain")]
    ClosedFormUnavailable,

    #[error("operation not supported for this domain: {0}")]
    UnsupportedDomain(String),

    #[error("degenerate kernel: {0}")]
    DegenerateKernel(String),

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("finite-difference stencil leaves the domain")]
    StencilOutside,

    #[error("linearly dependent tuple (Gram determinant {gram:e})")]
    DependentTuple { gram: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("zero vector")]
    ZeroVector,

    #[error("optimizer diverged: {0}")]
    OptimizerDiverged(String),

    #[error("too few samples: {samples} < {minimum}")]
    TooFewSamples { samples: usize, minimum: usize },

    #[error("invalid path: {0}")]
    InvalidPath(String),
}

pub type Result<T> = std::result::Result<T, Error>;
