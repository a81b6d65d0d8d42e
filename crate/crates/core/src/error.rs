use thiserror::Error;

/// Errors raised by the algebra kernel and the approximation drivers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    NvarsMismatch { left: usize, right: usize },

    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },

    #[error("expected {expected} images, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("odd variable count {0}: a symplectic structure needs 2n variables")]
    OddVariableCount(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("linear part is singular")]
    SingularLinearPart,

    #[error("image {index} has a nonzero constant term; translations are not supported")]
    ConstantTerm { index: usize },

    #[error("matrix is not symplectic")]
    NotSymplecticMatrix,

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("arity mismatch: word has arity {word}, factor has arity {factor}")]
    ArityMismatch { word: usize, factor: usize },

    #[error("jacobian is not a nonzero constant (first offending degree {degree})")]
    NonConstantJacobian { degree: u32 },

    #[error("input is not a symplectomorphism: {0}")]
    NotSymplectic(String),

    #[error("closedness identities fail: {0}")]
    ClosednessFailure(String),

    #[error("polynomial is not homogeneous: {0}")]
    Inhomogeneous(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("division is not exact")]
    InexactDivision,

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
