use crate::linalg::LinalgError;
use crate::scalar::Real;

/// Thresholds that turn exact-arithmetic statements into numerical decisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    rank_tol: T,
    residual_tol: T,
}

impl<T: Real> Tolerance<T> {
    /// `rank_tol` is relative to the largest singular value and must lie in (0, 1);
    /// `residual_tol` must be positive.
    pub fn new(rank_tol: T, residual_tol: T) -> Result<Self, LinalgError> {
        if !(rank_tol > T::zero() && rank_tol < T::one()) {
            return Err(LinalgError::InvalidTolerance(format!(
                "rank_tol must lie in (0, 1), got {rank_tol}"
            )));
        }
        if !(residual_tol > T::zero() && residual_tol.is_finite()) {
            return Err(LinalgError::InvalidTolerance(format!(
                "residual_tol must be positive, got {residual_tol}"
            )));
        }
        Ok(Self {
            rank_tol,
            residual_tol,
        })
    }

    #[inline]
    pub fn rank_tol(&self) -> T {
        self.rank_tol
    }

    #[inline]
    pub fn residual_tol(&self) -> T {
        self.residual_tol
    }
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self {
            rank_tol: T::default_rank_tol(),
            residual_tol: T::default_residual_tol(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(Tolerance::new(0.0, 1e-8).is_err());
        assert!(Tolerance::new(1.0, 1e-8).is_err());
        assert!(Tolerance::new(1e-9, 0.0).is_err());
        assert!(Tolerance::new(1e-9, f64::NAN).is_err());
        let t = Tolerance::new(1e-9, 1e-8).unwrap();
        assert_eq!(t, Tolerance::<f64>::default());
    }
}
