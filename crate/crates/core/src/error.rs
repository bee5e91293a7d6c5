use thiserror::Error;

/// Errors raised by the algebraic layers and the evaluators built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-invertible quaternion")]
    NonInvertibleQuaternion,

    #[error("argument of the zero quaternion is undefined")]
    ZeroArgument,

    #[error("singular matrix (Dieudonné determinant {det:e})")]
    SingularMatrix { det: f64 },

    #[error("matrix is not upper-triangular (|c| = {c_norm:e})")]
    NotTriangular { c_norm: f64 },

    #[error("matrix is not in Σ (Dieudonné determinant {det})")]
    NotInSigma { det: f64 },

    #[error("entry `{entry}` vanishes: {reason}")]
    VanishingEntry { entry: &'static str, reason: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
