use crate::arrangement::{Arrangement, Subspace};
use crate::linalg::{rank, Matrix, SymmetricEigen, Tolerance};
use crate::scalar::Real;
use crate::scaling::{is_admissible, optimize, HullCertificate, OptimizeOptions, ScalingError, ScalingMap};

/// The spanning problem in `R^d` built from an arbitrary arrangement and a hull
/// certificate: `d` auxiliary lines along an orthonormal basis `b_s` of the sum
/// `V`, every hull set completed to a basis set with auxiliary lines, and all
/// spaces written in the coordinates `b_s -> e_s`.
#[derive(Debug, Clone)]
pub struct BarthecModel<T> {
    /// Rows `b_1, ..., b_d` (`d x ell`).
    pub basis: Matrix<T>,
    /// `n + d` spaces in `R^d`; the last `d` are the coordinate axes.
    pub model: Arrangement<T>,
    /// Extended probability vector; its first `n` entries are the input `p`.
    pub p: Vec<T>,
    /// Extended hull sets `H' = H ∪ G` (sorted) with their trial counts.
    pub terms: Vec<(Vec<usize>, usize)>,
    pub trials: usize,
    /// Number of original spaces.
    pub n: usize,
}

impl<T: Real> BarthecModel<T> {
    pub fn d(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    /// `M = B^T M' B + (I - B^T B)`: acts as `M'` on `V` in the `b` coordinates
    /// and as the identity on the orthogonal complement.
    pub fn lift(&self, m_model: &Matrix<T>) -> Matrix<T> {
        let b = &self.basis;
        let bb = b.transpose_mul(b);
        b.transpose_mul(&m_model.matmul(b)).add(&Matrix::identity(self.ambient()).sub(&bb))
    }
}

/// Largest eigenvalue of `sum_i p_i Proj_{M V_i}`, i.e. the maximum over unit
/// `w` of `sum_i p_i |Proj_{M V_i} w|^2`.
pub fn projection_bound<T: Real>(arr: &Arrangement<T>, p: &[T], m: &Matrix<T>, tol: &Tolerance<T>) -> T {
    let l = arr.ambient();
    let mut s = Matrix::zeros(l, l);
    for (sp, &pi) in arr.spaces().iter().zip(p) {
        if sp.is_zero() || pi == T::zero() {
            continue;
        }
        let u = crate::linalg::orthonormalize(&sp.basis().mul_transpose(m), tol);
        s = s.add(&u.transpose_mul(&u).scale(pi));
    }
    *SymmetricEigen::new(&s.symmetrized()).values.last().unwrap_or(&T::zero())
}

pub fn barthec_form<T: Real>(
    arr: &Arrangement<T>,
    hull: &HullCertificate,
    tol: &Tolerance<T>,
) -> Result<BarthecModel<T>, ScalingError<T>> {
    let n = arr.n();
    if hull.n() != n {
        return Err(ScalingError::MissingHull(format!("certificate covers {} spaces, arrangement has {n}", hull.n())));
    }
    if hull.trials == 0 || !hull.check() {
        return Err(ScalingError::MissingHull("weights do not reproduce p".into()));
    }
    if let Some(t) = hull.terms.iter().find(|t| t.set.iter().any(|&i| i >= n) || !is_admissible(arr, &t.set, tol)) {
        return Err(ScalingError::NotAdmissible { set: t.set.clone() });
    }
    let sum = arr.sum_space(tol);
    let d = sum.dim();
    if d == 0 {
        return Err(ScalingError::EmptySum);
    }
    let basis = sum.basis().clone();
    let mut spaces: Vec<Subspace<T>> = arr
        .spaces()
        .iter()
        .map(|s| {
            if s.is_zero() {
                Subspace::zero(d)
            } else {
                Subspace::span(&s.basis().mul_transpose(&basis), tol)
            }
        })
        .collect();
    spaces.extend((0..d).map(|s| Subspace::coordinate(d, &[s])));
    let model = Arrangement::new(d, spaces)?;

    let mut counts = vec![0usize; n + d];
    let mut terms = Vec::with_capacity(hull.terms.len());
    for term in &hull.terms {
        let mut rows = Matrix::vstack(d, term.set.iter().map(|&i| model.space(i).basis()));
        let mut r = if rows.rows() == 0 { 0 } else { rank(&rows, tol) };
        let mut ext = term.set.clone();
        for s in 0..d {
            if r == d {
                break;
            }
            let mut cand = rows.clone();
            cand.push_row(model.space(n + s).basis().row(0));
            let rc = rank(&cand, tol);
            if rc > r {
                rows = cand;
                r = rc;
                ext.push(n + s);
            }
        }
        if r != d {
            return Err(ScalingError::MissingHull(format!("set {:?} could not be completed to a basis set", term.set)));
        }
        for &i in &ext {
            counts[i] += term.count;
        }
        terms.push((ext, term.count));
    }
    let trials = T::from_count(hull.trials);
    let p = counts.iter().map(|&c| T::from_count(c) / trials).collect();
    Ok(BarthecModel { basis, model, p, terms, trials: hull.trials, n })
}

/// Augments, scales the model and lifts the result back to the original
/// ambient space. The returned bound is the largest eigenvalue of
/// `sum_{i <= n} p_i Proj_{M V_i}`.
pub fn barthe_scale<T: Real>(
    arr: &Arrangement<T>,
    hull: &HullCertificate,
    opts: &OptimizeOptions<T>,
    tol: &Tolerance<T>,
) -> Result<(BarthecModel<T>, ScalingMap<T>, Matrix<T>, T), ScalingError<T>> {
    let model = barthec_form(arr, hull, tol)?;
    let map = optimize(&model.model, &model.p, opts, tol)?;
    let m = model.lift(&map.m);
    let p: Vec<T> = model.p[..model.n].to_vec();
    let bound = projection_bound(arr, &p, &m, tol);
    Ok((model, map, m, bound))
}
