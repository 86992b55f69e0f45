use itertools::Itertools;

use crate::linalg::decomp::{determinant, Svd, SymmetricEigen};
use crate::linalg::{LinalgError, Matrix, Tolerance};
use crate::scalar::Real;

/// Largest column count accepted by [`cauchy_binet_check`].
pub const CAUCHY_BINET_MAX_COLS: usize = 12;

/// Orthonormal basis of the row span of `m`, one basis vector per row.
///
/// Singular directions below `rank_tol * sigma_max` are discarded, so the row
/// count equals the numerical rank. An all-zero input yields a `0 x cols` matrix.
pub fn orthonormalize<T: Real>(m: &Matrix<T>, tol: &Tolerance<T>) -> Matrix<T> {
    let svd = Svd::new(m);
    let r = svd.rank_relative(tol.rank_tol());
    basis_from_svd(&svd, r, m.cols())
}

/// Like [`orthonormalize`] but with the cutoff `rank_tol * scale` instead of
/// relative to the input's own largest singular value. Used for images under a
/// linear map, where the meaningful scale is the norm of the map.
pub fn orthonormalize_scaled<T: Real>(m: &Matrix<T>, scale: T, tol: &Tolerance<T>) -> Matrix<T> {
    let svd = Svd::new(m);
    let r = svd.rank_absolute(tol.rank_tol() * scale);
    basis_from_svd(&svd, r, m.cols())
}

fn basis_from_svd<T: Real>(svd: &Svd<T>, r: usize, cols: usize) -> Matrix<T> {
    let mut out = Matrix::zeros(r, cols);
    for i in 0..r {
        let row = svd.vt.row(i);
        // sign convention: largest-magnitude entry positive
        let lead = row
            .iter()
            .enumerate()
            .fold((0, T::zero()), |(bi, bv), (j, &x)| if x.abs() > bv.abs() + T::epsilon() { (j, x) } else { (bi, bv) })
            .1;
        let sign = if lead < T::zero() { -T::one() } else { T::one() };
        for (o, &x) in out.row_mut(i).iter_mut().zip(row) {
            *o = sign * x;
        }
    }
    out
}

/// Numerical rank: singular values at or above `rank_tol * sigma_max`.
pub fn rank<T: Real>(m: &Matrix<T>, tol: &Tolerance<T>) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    Svd::new(m).rank_relative(tol.rank_tol())
}

/// Orthogonal projector `sum_j u_j u_j^T` onto the span of the (orthonormal) rows of `u`.
pub fn projector<T: Real>(u: &Matrix<T>, tol: &Tolerance<T>) -> Result<Matrix<T>, LinalgError> {
    let defect = u.orthonormality_defect();
    if defect > tol.residual_tol() {
        return Err(LinalgError::NotOrthonormal {
            deviation: defect.as_f64(),
        });
    }
    Ok(u.transpose_mul(u))
}

/// Symmetric positive definite `M` with `M^T M = X^{-1}`, i.e. `M = X^{-1/2}`.
///
/// Fails when `X` is not symmetric or its smallest eigenvalue is not above
/// `rank_tol` times the largest.
pub fn inv_sqrt_factor<T: Real>(x: &Matrix<T>, tol: &Tolerance<T>) -> Result<Matrix<T>, LinalgError> {
    if !x.is_square() {
        return Err(LinalgError::ShapeMismatch {
            op: "inv_sqrt_factor",
            left: x.shape(),
            right: (x.cols(), x.rows()),
        });
    }
    let asym = x.asymmetry();
    if asym > tol.residual_tol() * x.max_abs().max(T::one()) {
        return Err(LinalgError::NotSymmetric {
            asymmetry: asym.as_f64(),
        });
    }
    let eig = SymmetricEigen::new(x);
    let (lo, hi) = match (eig.values.first(), eig.values.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Ok(Matrix::zeros(0, 0)),
    };
    if !(hi > T::zero() && lo > tol.rank_tol() * hi) {
        return Err(LinalgError::NotPositiveDefinite {
            min_eig: lo.as_f64(),
            max_eig: hi.as_f64(),
        });
    }
    Ok(eig.map_values(|l| T::one() / l.sqrt()))
}

/// Largest singular value; zero for empty or zero matrices.
pub fn spectral_norm<T: Real>(m: &Matrix<T>) -> T {
    if m.rows() == 0 || m.cols() == 0 {
        return T::zero();
    }
    Svd::new(m).max_singular()
}

/// Evaluates both sides of `det(AB) = sum_I det(A_I) det(B_I)` over all
/// `ell`-subsets `I` of the `m` inner indices.
pub fn cauchy_binet_check<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<(T, T), LinalgError> {
    let (ell, m) = a.shape();
    if b.shape() != (m, ell) {
        return Err(LinalgError::ShapeMismatch {
            op: "cauchy_binet_check",
            left: a.shape(),
            right: b.shape(),
        });
    }
    if m > CAUCHY_BINET_MAX_COLS {
        return Err(LinalgError::SizeLimit {
            m,
            max: CAUCHY_BINET_MAX_COLS,
        });
    }
    let lhs = determinant(&a.matmul(b));
    let rhs = (0..m)
        .combinations(ell)
        .map(|idx| determinant(&a.select_cols(&idx)) * determinant(&b.select_rows(&idx)))
        .sum();
    Ok((lhs, rhs))
}

/// Least-squares coefficients `c` with `c^T g ~ u` (rows of `g` as generators),
/// together with the residual norm `|g^T c - u|`.
pub(crate) fn solve_row_combination<T: Real>(g: &Matrix<T>, u: &[T], tol: &Tolerance<T>) -> (Vec<T>, T) {
    let r = g.rows();
    if r == 0 {
        return (Vec::new(), crate::scalar::norm(u));
    }
    // g = U S Vt  =>  c = U S^+ Vt u
    let svd = Svd::new(g);
    let keep = svd.rank_relative(tol.rank_tol());
    let vtu = svd.vt.mul_vec(u);
    let mut c = vec![T::zero(); r];
    for k in 0..keep {
        let w = vtu[k] / svd.s[k];
        for (i, ci) in c.iter_mut().enumerate() {
            *ci += svd.u[(i, k)] * w;
        }
    }
    let recon = g.vec_mul(&c);
    let resid = recon.iter().zip(u).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt();
    (c, resid)
}
