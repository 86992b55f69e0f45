use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("expected {expected} entries for the given shape, got {got}")]
    DataLength { expected: usize, got: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("rows are not orthonormal (max Gram deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("degenerate scaling state: matrix not positive definite (eigenvalues in [{min_eig:e}, {max_eig:e}])")]
    NotPositiveDefinite { min_eig: f64, max_eig: f64 },
    #[error("combinatorial sum over {m} columns exceeds the limit of {max}")]
    SizeLimit { m: usize, max: usize },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
}
