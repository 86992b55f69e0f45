//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
///
/// The default tolerances are tied to the precision of the type, so that
/// rank decisions made with `Tolerance::default()` stay meaningful for both.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative singular-value cutoff used for rank decisions.
    fn default_rank_tol() -> Self;
    /// Residual threshold for membership, orthonormality and annihilation checks.
    fn default_residual_tol() -> Self;

    /// Converts an `f64` literal. Every `f64` is representable (possibly rounded)
    /// in both supported types, so this never fails.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f64 {
    fn default_rank_tol() -> Self {
        1e-9
    }
    fn default_residual_tol() -> Self {
        1e-8
    }
}

impl Real for f32 {
    fn default_rank_tol() -> Self {
        1e-4
    }
    fn default_residual_tol() -> Self {
        1e-3
    }
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
