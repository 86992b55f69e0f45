use crate::arrangement::ArrangementError;
use crate::linalg::{orthonormalize, orthonormalize_scaled, rank, spectral_norm, Matrix, Svd, Tolerance};
use crate::scalar::{dot, Real};

/// Subspace of `R^ambient` stored as an orthonormal basis (one vector per row).
///
/// A basis with zero rows represents the zero space.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<T> {
    basis: Matrix<T>,
}

impl<T: Real> Subspace<T> {
    /// Wraps a basis that is already orthonormal; rejects it otherwise.
    pub fn from_orthonormal(basis: Matrix<T>, tol: &Tolerance<T>) -> Result<Self, ArrangementError> {
        let defect = basis.orthonormality_defect();
        if defect > tol.residual_tol() {
            return Err(ArrangementError::NotOrthonormal {
                space: None,
                deviation: defect.as_f64(),
            });
        }
        Ok(Self { basis })
    }

    /// Row span of an arbitrary spanning set.
    pub fn span(rows: &Matrix<T>, tol: &Tolerance<T>) -> Self {
        Self {
            basis: orthonormalize(rows, tol),
        }
    }

    pub fn zero(ambient: usize) -> Self {
        Self {
            basis: Matrix::zeros(0, ambient),
        }
    }

    /// `span{e_i : i in coords}`.
    pub fn coordinate(ambient: usize, coords: &[usize]) -> Self {
        let basis = Matrix::from_fn(coords.len(), ambient, |r, c| if coords[r] == c { T::one() } else { T::zero() });
        Self { basis }
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.basis.rows() == 0
    }

    #[inline]
    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    /// Orthonormal basis of `V_1 + ... + V_r`.
    pub fn sum<'a>(ambient: usize, spaces: impl IntoIterator<Item = &'a Self>, tol: &Tolerance<T>) -> Self {
        let stacked = Matrix::vstack(ambient, spaces.into_iter().map(|s| &s.basis));
        Self::span(&stacked, tol)
    }

    /// `dim(self + other)` by numerical rank of the stacked bases.
    pub fn sum_dim(&self, other: &Self, tol: &Tolerance<T>) -> usize {
        rank(&Matrix::vstack(self.ambient(), [&self.basis, &other.basis]), tol)
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &[T]) -> Vec<T> {
        let coeffs = self.basis.mul_vec(v);
        self.basis.vec_mul(&coeffs)
    }

    /// `|Proj(v)|^2`.
    pub fn projection_norm_sq(&self, v: &[T]) -> T {
        self.basis.mul_vec(v).iter().map(|&c| c * c).sum()
    }

    /// Largest distance from a basis vector of `other` to `self`.
    pub fn containment_residual(&self, other: &Self) -> T {
        other
            .basis
            .row_iter()
            .map(|r| {
                let p = self.project(r);
                r.iter().zip(&p).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt()
            })
            .fold(T::zero(), T::max)
    }

    /// `other ⊆ self` within `residual_tol`.
    pub fn contains(&self, other: &Self, tol: &Tolerance<T>) -> bool {
        self.containment_residual(other) <= tol.residual_tol()
    }

    /// Equality as subspaces.
    pub fn same_as(&self, other: &Self, tol: &Tolerance<T>) -> bool {
        self.dim() == other.dim() && self.contains(other, tol) && other.contains(self, tol)
    }

    /// Image under the linear map `x -> P x`. Directions whose image is below
    /// `rank_tol * |P|` are treated as annihilated.
    pub fn image(&self, p: &Matrix<T>, tol: &Tolerance<T>) -> Self {
        let mapped = self.basis.mul_transpose(p);
        let scale = spectral_norm(p);
        Self {
            basis: orthonormalize_scaled(&mapped, scale, tol),
        }
    }

    /// Cosine of the smallest principal angle; zero if either space is `{0}`.
    pub fn max_cosine(&self, other: &Self) -> T {
        if self.is_zero() || other.is_zero() {
            return T::zero();
        }
        Svd::new(&self.basis.mul_transpose(&other.basis)).max_singular()
    }

    /// A unit vector of `self` realizing the smallest principal angle with
    /// `other`, with that angle's cosine.
    pub fn closest_direction(&self, other: &Self) -> Option<(Vec<T>, T)> {
        if self.is_zero() || other.is_zero() {
            return None;
        }
        let svd = Svd::new(&self.basis.mul_transpose(&other.basis));
        let coeffs = svd.u.column(0);
        let v = self.basis.vec_mul(&coeffs);
        let n = dot(&v, &v).sqrt();
        Some((v.iter().map(|&x| x / n).collect(), svd.max_singular()))
    }
}

/// Slack on the separation boundary absorbing rounding in the cosine.
fn separation_slack<T: Real>() -> T {
    T::epsilon() * T::lit(64.0)
}

/// `|<u, u'>| <= 1 - tau` for all unit `u ∈ v`, `u' ∈ w`. The boundary counts as
/// separated. Zero spaces are vacuously separated from everything.
pub fn tau_separated<T: Real>(v: &Subspace<T>, w: &Subspace<T>, tau: T) -> bool {
    v.max_cosine(w) <= T::one() - tau + separation_slack()
}
