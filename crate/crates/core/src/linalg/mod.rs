//! Deterministic dense linear-algebra kernel.
//!
//! Everything here is a pure function on value types. Rank decisions are
//! relative to the largest singular value unless a routine says otherwise.

mod decomp;
mod error;
mod matrix;
mod ops;
mod tolerance;

pub use decomp::{cholesky, determinant, Svd, SymmetricEigen};
pub(crate) use decomp::solve_spd_shifted;
pub use error::LinalgError;
pub use matrix::Matrix;
pub(crate) use ops::solve_row_combination;
pub use ops::{
    cauchy_binet_check, inv_sqrt_factor, orthonormalize, orthonormalize_scaled, projector, rank, spectral_norm,
    CAUCHY_BINET_MAX_COLS,
};
pub use tolerance::Tolerance;
