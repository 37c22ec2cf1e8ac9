use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ManError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("ambient dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("region index {index} out of range for {sites} sites")]
    InvalidRegion { index: usize, sites: usize },
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("basis is not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),
    #[error("algebra is not collinear (n_J/d_J not constant)")]
    NotCollinear,
    #[error("lattice closed form requires uniform site dimensions")]
    NonUniformSites,
    #[error("numerical inconsistency: {0}")]
    Numerical(String),
    #[error("structural decomposition failed: {0}")]
    DecompositionFailed(String),
    #[error("generator closure did not stabilize within {0} rounds")]
    ClosureDidNotConverge(usize),
    #[error("ill-conditioned estimator: {0}")]
    IllConditioned(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, ManError>;
