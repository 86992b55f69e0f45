//! Dimension certificates: the rank certificate for well-separated systems,
//! the bound/collapse dichotomy and the project-and-recurse driver.

mod decompose;
mod recurse;
mod separated;

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

pub use decompose::{decompose_step, entry_bound, Branch, DecomposeOptions};
pub use recurse::{certify, parse_trace, CertifyOptions, Trace, TraceRound};
pub use separated::{coefficient_expand, diagdom_rank_bound, separated_certificate, separation_witness};

use crate::arrangement::{Arrangement, ArrangementError};
use crate::dependency::DependencyError;
use crate::linalg::{rank, spectral_norm, LinalgError, Matrix, Tolerance};
use crate::rational::{format_rational, Rational};
use crate::scalar::Real;
use crate::scaling::ScalingError;

/// Exact rationals wide enough for the recursion constants.
pub type Wide = Ratio<u128>;

pub(crate) fn widen(r: &Rational) -> Wide {
    Ratio::new(*r.numer() as u128, *r.denom() as u128)
}

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Dependency(#[from] DependencyError),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("scaling: {0}")]
    Scaling(String),
    #[error("vector lies outside the sum (residual {residual:e})")]
    Membership { residual: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("system degree: index {index} lies in {have} sets, {need} required")]
    SystemDegree { index: usize, have: usize, need: u64 },
    #[error("inconsistent system: {0}")]
    InconsistentSystem(String),
    #[error("diagonal not constant: entry {index} is {value}, expected {expected}")]
    NonConstantDiagonal { index: usize, value: f64, expected: f64 },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("budget exceeded: {reason}")]
    Budget { reason: String, trace: Box<Trace> },
    #[error("round cap exceeded: {rounds} rounds, cap {cap}")]
    RoundCap { rounds: usize, cap: u128 },
    #[error("unsound certificate: measured {measured} > bound {bound}")]
    Unsound { measured: usize, bound: u128 },
    #[error("certificate check failed: {0}")]
    Check(String),
}

impl<T: Real> From<ScalingError<T>> for CertifyError {
    fn from(e: ScalingError<T>) -> Self {
        CertifyError::Scaling(e.to_string())
    }
}

/// Annihilator evidence `D A = 0` for a flat basis matrix `A`.
#[derive(Debug, Clone)]
pub struct DependencyMatrix<T> {
    /// `m x ell`, rows are the orthonormal basis vectors in flat order.
    pub a: Matrix<T>,
    /// `m x m`, rows `y_s`.
    pub d: Matrix<T>,
    /// Common diagonal value `ceil(delta n)`.
    pub l: u64,
    /// Budget `alpha * L * m / tau` on the off-diagonal squared mass.
    pub k_budget: T,
    /// Measured off-diagonal squared mass.
    pub k: T,
    /// Flat row to space index.
    pub psi: Vec<usize>,
    /// `max(0, ceil(m - K / L^2))`.
    pub rank_lower: usize,
}

impl<T: Real> DependencyMatrix<T> {
    /// `||D A|| / (||D|| ||A||)`.
    pub fn annihilation_ratio(&self) -> T {
        let da = spectral_norm(&self.d.matmul(&self.a));
        let den = spectral_norm(&self.d) * spectral_norm(&self.a);
        if den == T::zero() {
            T::zero()
        } else {
            da / den
        }
    }

    /// Off-diagonal squared mass of row `s`.
    pub fn row_mass(&self, s: usize) -> T {
        self.d.row(s).iter().enumerate().filter(|&(t, _)| t != s).map(|(_, &v)| v * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollapseBranch {
    /// Harvested from sampled prefixes.
    Sample,
    /// Pulled back from a scaled, separated sub-arrangement.
    Scale,
}

#[derive(Debug, Clone)]
pub enum Outcome<T> {
    Bound {
        d_bound: u128,
        evidence: Vec<DependencyMatrix<T>>,
    },
    Collapse {
        indices: Vec<usize>,
        /// `q x ell`, row `r` lies in `V_{indices[r]}`.
        z: Matrix<T>,
        w_dim: usize,
        branch: CollapseBranch,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertParams {
    pub alpha: u64,
    pub delta: Rational,
    pub beta: Rational,
    pub k: usize,
    pub n: usize,
    pub d: usize,
}

impl fmt::Display for CertParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha {} delta {} beta {} k {} n {} d {}",
            self.alpha,
            format_rational(&self.delta),
            format_rational(&self.beta),
            self.k,
            self.n,
            self.d
        )
    }
}

#[derive(Debug, Clone)]
pub struct Certificate<T> {
    pub outcome: Outcome<T>,
    pub params: CertParams,
}

/// `ceil(delta n / (20 alpha))`, the minimum witness size.
pub fn min_witness(alpha: u64, delta: &Rational, n: usize) -> u64 {
    let r = widen(delta) * Wide::from_integer(n as u128) / Wide::from_integer(20 * alpha.max(1) as u128);
    r.ceil().to_integer() as u64
}

/// `floor(beta d)`.
pub fn beta_floor(beta: &Rational, d: usize) -> usize {
    (widen(beta) * Wide::from_integer(d as u128)).floor().to_integer() as usize
}

impl<T: Real> Certificate<T> {
    pub fn is_bound(&self) -> bool {
        matches!(self.outcome, Outcome::Bound { .. })
    }

    /// Re-checks every stated invariant against `arr`.
    pub fn verify(&self, arr: &Arrangement<T>, tol: &Tolerance<T>) -> Result<(), CertifyError> {
        let p = &self.params;
        match &self.outcome {
            Outcome::Bound { d_bound, evidence } => {
                let d = arr.dimension(tol);
                if d as u128 > *d_bound {
                    return Err(CertifyError::Unsound { measured: d, bound: *d_bound });
                }
                for ev in evidence {
                    if ev.annihilation_ratio() > T::lit(1e-6) {
                        return Err(CertifyError::Check("D A is not numerically zero".into()));
                    }
                    let lf = T::from_count(ev.l as usize);
                    if (0..ev.d.rows()).any(|s| ev.d[(s, s)] != lf) {
                        return Err(CertifyError::Check("diagonal differs from L".into()));
                    }
                    if ev.k > ev.k_budget * (T::one() + T::lit(1e-9)) + T::lit(1e-6) {
                        return Err(CertifyError::Check("off-diagonal mass exceeds budget".into()));
                    }
                    if rank(&ev.a, tol) as u128 > *d_bound {
                        return Err(CertifyError::Check("rank(A) exceeds the bound".into()));
                    }
                }
                Ok(())
            }
            Outcome::Collapse { indices, z, w_dim, .. } => {
                let need = min_witness(p.alpha, &p.delta, p.n);
                if (indices.len() as u64) < need {
                    return Err(CertifyError::Check(format!("witness has {} spaces, need {need}", indices.len())));
                }
                if z.rows() != indices.len() || z.cols() != arr.ambient() {
                    return Err(CertifyError::Check("witness shape".into()));
                }
                for (r, &i) in indices.iter().enumerate() {
                    let zr = z.row(r);
                    let nz = crate::scalar::norm(zr);
                    if nz <= tol.residual_tol() {
                        return Err(CertifyError::Check(format!("z row {r} is zero")));
                    }
                    let proj = arr.space(i).project(zr);
                    let res = crate::scalar::norm(&proj.iter().zip(zr).map(|(a, b)| *a - *b).collect::<Vec<_>>());
                    if res > tol.residual_tol() * nz {
                        return Err(CertifyError::Check(format!("z row {r} is not in V_{i}")));
                    }
                }
                let rz = rank(z, tol);
                if rz != *w_dim || rz > beta_floor(&p.beta, p.d) {
                    return Err(CertifyError::Check(format!(
                        "rank(z) = {rz} (claimed {w_dim}) exceeds floor(beta d) = {}",
                        beta_floor(&p.beta, p.d)
                    )));
                }
                Ok(())
            }
        }
    }
}
