use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("scale factor must be positive")]
    NonPositiveScale,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix size {matrix} does not match block size {block}")]
    SizeMismatch { matrix: usize, block: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("the zero form has no weight polytope")]
    ZeroForm,
    #[error("invalid form: {0}")]
    InvalidForm(String),
    #[error("at least one torus frame is required")]
    EmptyFrames,
    #[error("one-parameter subgroup is trivial after projection")]
    TrivialOnePsg,
    #[error("grid values must be positive")]
    NonPositiveAlpha,
    #[error("curve degree must be at least 2, got {0}")]
    DegreeTooSmall(u32),
    #[error("curve is not certified smooth")]
    SingularCurve,
    #[error("elimination failed: {0}")]
    Elimination(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("certificate does not replay: {0}")]
    Replay(String),
}

pub type Result<T> = std::result::Result<T, Error>;
