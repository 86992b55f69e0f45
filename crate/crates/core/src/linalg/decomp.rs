//! Factorizations: one-sided Jacobi SVD, cyclic Jacobi eigensolver, Cholesky and LU.
//!
//! Jacobi methods are slower than bidiagonalization for large matrices but give
//! high relative accuracy and are fully deterministic, which is what the rank
//! decisions downstream depend on. Matrices here are at most a few hundred wide.

use crate::linalg::Matrix;
use crate::scalar::{dot, Real};

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `A = U diag(s) Vt`.
///
/// `s` is sorted in descending order and has `min(rows, cols)` entries. Columns
/// of `u` belonging to zero singular values are zero.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub s: Vec<T>,
    pub vt: Matrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn new(a: &Matrix<T>) -> Self {
        if a.rows() >= a.cols() {
            let (u, s, v) = hestenes(a);
            Svd { u, s, vt: v.transpose() }
        } else {
            let (u, s, v) = hestenes(&a.transpose());
            Svd {
                u: v,
                s,
                vt: u.transpose(),
            }
        }
    }

    pub fn max_singular(&self) -> T {
        self.s.first().copied().unwrap_or_else(T::zero)
    }

    /// Number of singular values at or above `rel * s_max`.
    pub fn rank_relative(&self, rel: T) -> usize {
        let smax = self.max_singular();
        if smax <= T::min_positive_value() {
            return 0;
        }
        self.s.iter().take_while(|&&s| s >= rel * smax).count()
    }

    /// Number of singular values at or above an absolute threshold.
    pub fn rank_absolute(&self, threshold: T) -> usize {
        let threshold = threshold.max(T::min_positive_value());
        self.s.iter().take_while(|&&s| s >= threshold).count()
    }
}

/// One-sided Jacobi on the columns of `a` (rows >= cols). Returns `(U, s, V)`.
fn hestenes<T: Real>(a: &Matrix<T>) -> (Matrix<T>, Vec<T>, Matrix<T>) {
    let (m, n) = a.shape();
    debug_assert!(m >= n);
    let mut w: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut w, p, q, c, s);
                rotate_pair(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<T> = w.iter().map(|c| dot(c, c).sqrt()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap().then(i.cmp(&j)));

    let mut u = Matrix::zeros(m, n);
    let mut vm = Matrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        s.push(sigma);
        if sigma > T::zero() {
            for i in 0..m {
                u[(i, k)] = w[j][i] / sigma;
            }
        }
        for i in 0..n {
            vm[(i, k)] = v[j][i];
        }
    }
    (u, s, vm)
}

fn rotate_pair<T: Real>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (lo, hi) = cols.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Eigendecomposition of a symmetric matrix: `A = V diag(values) V^T`,
/// eigenvalues ascending, eigenvectors in the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

impl<T: Real> SymmetricEigen<T> {
    /// Cyclic Jacobi. Only the symmetric part of `a` is used.
    pub fn new(a: &Matrix<T>) -> Self {
        assert!(a.is_square(), "eigendecomposition needs a square matrix");
        let n = a.rows();
        let mut m = a.symmetrized();
        let mut v = Matrix::identity(n);
        let eps = T::epsilon();

        for _ in 0..MAX_SWEEPS {
            let off: T = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)] * m[(i, j)])
                .sum();
            let diag: T = (0..n).map(|i| m[(i, i)] * m[(i, i)]).sum();
            if off <= eps * eps * diag || off == T::zero() {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = m[(p, q)];
                    if apq == T::zero() {
                        continue;
                    }
                    let theta = (m[(q, q)] - m[(p, p)]) / (apq + apq);
                    let t = theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                        m[(k, p)] = c * mkp - s * mkq;
                        m[(k, q)] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                        m[(p, k)] = c * mpk - s * mqk;
                        m[(q, k)] = s * mpk + c * mqk;
                    }
                    for k in 0..n {
                        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap().then(i.cmp(&j)));
        let values = order.iter().map(|&i| m[(i, i)]).collect();
        let vectors = v.select_cols(&order);
        SymmetricEigen { values, vectors }
    }

    /// `V diag(g(values)) V^T`.
    pub fn map_values(&self, g: impl Fn(T) -> T) -> Matrix<T> {
        let n = self.values.len();
        let scaled = Matrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * g(self.values[j]));
        scaled.mul_transpose(&self.vectors).symmetrized()
    }
}

/// Lower-triangular Cholesky factor, or `None` if `a` is not numerically positive definite.
pub fn cholesky<T: Real>(a: &Matrix<T>) -> Option<Matrix<T>> {
    assert!(a.is_square());
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Determinant by LU with partial pivoting.
pub fn determinant<T: Real>(a: &Matrix<T>) -> T {
    assert!(a.is_square(), "determinant needs a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    let mut det = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().partial_cmp(&m[(j, col)].abs()).unwrap())
            .unwrap();
        if m[(pivot, col)] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            for k in 0..n {
                let tmp = m[(col, k)];
                m[(col, k)] = m[(pivot, k)];
                m[(pivot, k)] = tmp;
            }
            det = -det;
        }
        let p = m[(col, col)];
        det *= p;
        for i in (col + 1)..n {
            let f = m[(i, col)] / p;
            if f == T::zero() {
                continue;
            }
            for k in col..n {
                let v = m[(col, k)];
                m[(i, k)] -= f * v;
            }
        }
    }
    det
}

/// Solves the symmetric positive (semi)definite system `(a + shift I) x = b` by
/// Cholesky, increasing the shift geometrically until the factorization succeeds.
pub(crate) fn solve_spd_shifted<T: Real>(a: &Matrix<T>, b: &[T], shift: T) -> Vec<T> {
    let n = a.rows();
    let scale = (0..n).fold(T::zero(), |m, i| m.max(a[(i, i)].abs())).max(T::one());
    let mut mu = shift;
    loop {
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] += mu;
        }
        if let Some(l) = cholesky(&shifted) {
            return cholesky_solve(&l, b);
        }
        mu = if mu == T::zero() { T::epsilon() * scale } else { mu * T::lit(10.0) };
    }
}

fn cholesky_solve<T: Real>(l: &Matrix<T>, b: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> Matrix<f64> {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), cols).unwrap()
    }

    fn reconstruct(svd: &Svd<f64>) -> Matrix<f64> {
        let k = svd.s.len();
        let us = Matrix::from_fn(svd.u.rows(), k, |i, j| svd.u[(i, j)] * svd.s[j]);
        us.matmul(&svd.vt)
    }

    #[test]
    fn svd_reconstructs_tall_and_wide() {
        let a = mat(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]);
        for m in [a.clone(), a.transpose()] {
            let svd = Svd::new(&m);
            assert!(reconstruct(&svd).sub(&m).max_abs() < 1e-12);
            assert!(svd.s.windows(2).all(|w| w[0] >= w[1]));
            assert!(svd.vt.orthonormality_defect() < 1e-12);
        }
    }

    #[test]
    fn svd_of_diagonal() {
        let svd = Svd::new(&mat(&[&[3.0, 0.0], &[0.0, -5.0]]));
        assert!((svd.s[0] - 5.0).abs() < 1e-14 && (svd.s[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_reconstructs() {
        let a = mat(&[&[4.0, 1.0, 0.5], &[1.0, 3.0, 0.2], &[0.5, 0.2, 1.0]]);
        let e = SymmetricEigen::new(&a);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        assert!(e.map_values(|x| x).sub(&a).max_abs() < 1e-12);
    }

    #[test]
    fn cholesky_and_det() {
        let a = mat(&[&[4.0, 2.0], &[2.0, 3.0]]);
        let l = cholesky(&a).unwrap();
        assert!(l.mul_transpose(&l).sub(&a).max_abs() < 1e-14);
        assert!((determinant(&a) - 8.0).abs() < 1e-12);
        assert!(cholesky(&mat(&[&[1.0, 2.0], &[2.0, 1.0]])).is_none());
        assert_eq!(determinant(&mat(&[&[1.0, 2.0], &[2.0, 4.0]])), 0.0);
        assert!((determinant(&mat(&[&[0.0, 1.0], &[1.0, 0.0]])) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn shifted_solve_handles_singular() {
        let a = mat(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        let x = solve_spd_shifted(&a, &[1.0, -1.0], 1e-8);
        assert!(x.iter().all(|v| v.is_finite()));
        assert!(x[0] > 0.0 && x[1] < 0.0);
    }
}
