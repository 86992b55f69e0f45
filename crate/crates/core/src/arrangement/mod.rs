//! Subspace arrangements: containers, validation, complex reduction,
//! generators and the text file format.

mod complex;
mod generate;
mod io;
mod subspace;

pub use complex::{complex_dimension, complex_to_real, ComplexSubspace};
pub use generate::{generate, generate_complex_planted, GeneratorSpec, PlantedComplex};
pub use io::{
    parse_arrangement, parse_matrix, write_arrangement, write_complex_arrangement, write_matrix, ArrangementFile, FileData,
};
pub use subspace::{tau_separated, Subspace};

use crate::linalg::{rank, LinalgError, Matrix, Tolerance};
use crate::scalar::Real;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArrangementError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("orthonormality violated{}: deviation {deviation:.3e}", fmt_space(*.space))]
    NotOrthonormal { space: Option<usize>, deviation: f64 },
    #[error("space {space} lives in R^{got}, arrangement ambient is {expected}")]
    AmbientMismatch { space: usize, expected: usize, got: usize },
    #[error("complex basis of space {space} is not independent over C (realified rank {rank}, need {need})")]
    ComplexDependent { space: usize, rank: usize, need: usize },
    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn fmt_space(space: Option<usize>) -> String {
    space.map(|s| format!(" in space {s}")).unwrap_or_default()
}

/// Whether the arrangement was given over the reals or obtained by realifying
/// a complex one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldTag {
    #[default]
    Real,
    ComplexOrigin,
}

/// Ordered list `V_0, ..., V_{n-1}` of subspaces of a common `R^ambient`.
#[derive(Debug, Clone, PartialEq)]
pub struct Arrangement<T> {
    ambient: usize,
    spaces: Vec<Subspace<T>>,
    field: FieldTag,
}

impl<T: Real> Arrangement<T> {
    pub fn new(ambient: usize, spaces: Vec<Subspace<T>>) -> Result<Self, ArrangementError> {
        for (i, s) in spaces.iter().enumerate() {
            if s.ambient() != ambient {
                return Err(ArrangementError::AmbientMismatch {
                    space: i,
                    expected: ambient,
                    got: s.ambient(),
                });
            }
        }
        Ok(Self {
            ambient,
            spaces,
            field: FieldTag::Real,
        })
    }

    pub fn with_field(mut self, field: FieldTag) -> Self {
        self.field = field;
        self
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.spaces.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }

    #[inline]
    pub fn field(&self) -> FieldTag {
        self.field
    }

    #[inline]
    pub fn spaces(&self) -> &[Subspace<T>] {
        &self.spaces
    }

    #[inline]
    pub fn space(&self, i: usize) -> &Subspace<T> {
        &self.spaces[i]
    }

    pub fn max_dim(&self) -> usize {
        self.spaces.iter().map(Subspace::dim).max().unwrap_or(0)
    }

    /// Total basis row count `m = sum dim V_i`.
    pub fn total_rows(&self) -> usize {
        self.spaces.iter().map(Subspace::dim).sum()
    }

    /// All bases stacked in index order (the matrix `A` of the rank certificate).
    pub fn stacked(&self) -> Matrix<T> {
        Matrix::vstack(self.ambient, self.spaces.iter().map(Subspace::basis))
    }

    /// `dim(V_0 + ... + V_{n-1})`.
    pub fn dimension(&self, tol: &Tolerance<T>) -> usize {
        rank(&self.stacked(), tol)
    }

    /// Orthonormal basis of the arrangement sum.
    pub fn sum_space(&self, tol: &Tolerance<T>) -> Subspace<T> {
        Subspace::sum(self.ambient, &self.spaces, tol)
    }

    /// Sub-arrangement on the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            ambient: self.ambient,
            spaces: indices.iter().map(|&i| self.spaces[i].clone()).collect(),
            field: self.field,
        }
    }

    /// Re-checks every basis for orthonormality.
    pub fn validate(&self, tol: &Tolerance<T>) -> Result<(), ArrangementError> {
        for (i, s) in self.spaces.iter().enumerate() {
            let defect = s.basis().orthonormality_defect();
            if defect > tol.residual_tol() {
                return Err(ArrangementError::NotOrthonormal {
                    space: Some(i),
                    deviation: defect.as_f64(),
                });
            }
        }
        Ok(())
    }
}

/// Every space has dimension at most `k`.
pub fn k_bounded_check<T: Real>(arr: &Arrangement<T>, k: usize) -> bool {
    arr.spaces().iter().all(|s| s.dim() <= k)
}

/// Pairs `(i, j)`, `i < j`, whose spaces intersect nontrivially.
pub fn pairwise_zero_intersection<T: Real>(arr: &Arrangement<T>, tol: &Tolerance<T>) -> Vec<(usize, usize)> {
    let n = arr.n();
    let mut bad = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (arr.space(i), arr.space(j));
            if a.is_zero() || b.is_zero() {
                continue;
            }
            if a.sum_dim(b, tol) < a.dim() + b.dim() {
                bad.push((i, j));
            }
        }
    }
    bad
}
