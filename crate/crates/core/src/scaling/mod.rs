//! Generalized Barthe scaling.
//!
//! Admissible-set sampling estimates the probability vector `p`; [`optimize`]
//! then maximizes `f(t, R) = <gamma, t> - ln det X` to small gradient and emits
//! `M = X^{-1/2}` with `sum_i p_i Proj_{M V_i}` close to the identity.

mod barthec;
mod optimize;
mod sample;
mod state;

use thiserror::Error;

pub use barthec::{barthe_scale, barthec_form, projection_bound, BarthecModel};
pub use optimize::{optimize, projection_gap, Obstruction, OptimizeOptions, ScalingMap};
pub use sample::{
    admissible_hull_vector, is_admissible, sample_admissible, sample_admissible_with_workers, AdmissibleSample,
    HullCertificate, HullTerm,
};
pub use state::{r_step, rotation_step, t_gradient, ScalingState};

use crate::arrangement::ArrangementError;
use crate::linalg::LinalgError;
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum ScalingError<T: Real> {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error("{what} has length {got}, expected {expected}")]
    Length { what: &'static str, expected: usize, got: usize },
    #[error("p[{index}] = {value} lies outside [0, 1]")]
    ProbabilityRange { index: usize, value: f64 },
    #[error("rotation for space {space} is not orthogonal")]
    NotOrthogonal { space: usize },
    #[error("degenerate scaling state: X not positive definite (eigenvalues in [{min_eig:e}, {max_eig:e}])")]
    Degenerate { min_eig: f64, max_eig: f64 },
    #[error("spaces with p > 0 span dimension {dim} of ambient {ambient}; augment first")]
    NotSpanning { dim: usize, ambient: usize },
    #[error("arrangement sum is the zero space")]
    EmptySum,
    #[error("hull certificate missing or inconsistent: {0}")]
    MissingHull(String),
    #[error("sampled set {set:?} fails the admissibility equation")]
    NotAdmissible { set: Vec<usize> },
    #[error("no convergence after {iterations} iterations (max |grad| {max_grad:e}, gap {gap:e})")]
    Timeout {
        iterations: usize,
        max_grad: f64,
        gap: f64,
        /// `f` at `best`, measured over the original spaces.
        objective: f64,
        /// Best state seen, in its rebased frame.
        best: Box<ScalingState<T>>,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}
