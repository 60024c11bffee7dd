use thiserror::Error;

pub type Result<T, E = OracleError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Core(#[from] nlhk_core::Error),

    #[error("invalid discretization: {0}")]
    Discretization(String),

    /// A matrix entry or boundary term came out non-finite.
    #[error("operator construction failed: {0}")]
    Construction(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    /// Perron-Frobenius violated after the sign fix; the matrix is not what
    /// it should be.
    #[error("ground state not strictly positive: {negative} of {points} grid values non-positive (min {min:.3e})")]
    GroundState {
        negative: usize,
        points: usize,
        min: f64,
    },

    #[error("verification window mismatch: {0}")]
    Window(String),

    #[error("path configuration: {0}")]
    PathConfig(String),
}
