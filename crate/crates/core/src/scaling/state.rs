use crate::arrangement::Arrangement;
use crate::linalg::{Matrix, Svd, SymmetricEigen};
use crate::scalar::{dot, Real};
use crate::scaling::ScalingError;

/// Point `(t, R_1, ..., R_n)` of the scaling objective
/// `f = <gamma, t> - ln det X`, `X = sum_ij e^{t_ij} x_ij x_ij^T`, together with
/// the derived `X`, `M = X^{-1/2}` and gradient.
///
/// Flat index `a` of `(i, j)` is `offset(i) + j`. The rows of `x(i)` are the
/// vectors `x_ij`, i.e. `R_i^T B_i` for the orthonormal basis rows `B_i`.
#[derive(Debug, Clone)]
pub struct ScalingState<T> {
    ell: usize,
    bases: Vec<Matrix<T>>,
    p: Vec<T>,
    offsets: Vec<usize>,
    t: Vec<T>,
    rot: Vec<Matrix<T>>,
    x: Vec<Matrix<T>>,
    xmat: Matrix<T>,
    m: Matrix<T>,
    logdet: T,
    grad: Vec<T>,
}

impl<T: Real> ScalingState<T> {
    /// Start point `t = 0`, `R_i = I`.
    pub fn new(arr: &Arrangement<T>, p: &[T]) -> Result<Self, ScalingError<T>> {
        let t = vec![T::zero(); arr.total_rows()];
        let rot = arr.spaces().iter().map(|s| Matrix::identity(s.dim())).collect();
        Self::from_parts(arr, p, t, rot)
    }

    /// Arbitrary point; each rotation must be `k_i x k_i` and orthogonal.
    pub fn from_parts(arr: &Arrangement<T>, p: &[T], t: Vec<T>, rot: Vec<Matrix<T>>) -> Result<Self, ScalingError<T>> {
        if p.len() != arr.n() {
            return Err(ScalingError::Length { what: "p", expected: arr.n(), got: p.len() });
        }
        if let Some((i, &v)) = p.iter().enumerate().find(|(_, &v)| !(v >= T::zero() && v <= T::one())) {
            return Err(ScalingError::ProbabilityRange { index: i, value: v.as_f64() });
        }
        if t.len() != arr.total_rows() {
            return Err(ScalingError::Length { what: "t", expected: arr.total_rows(), got: t.len() });
        }
        if rot.len() != arr.n() {
            return Err(ScalingError::Length { what: "rotations", expected: arr.n(), got: rot.len() });
        }
        let mut offsets = Vec::with_capacity(arr.n() + 1);
        let mut acc = 0;
        for (i, s) in arr.spaces().iter().enumerate() {
            offsets.push(acc);
            acc += s.dim();
            let r = &rot[i];
            let tol = T::lit(1e3) * T::epsilon() * T::from_count(s.dim().max(1));
            if r.shape() != (s.dim(), s.dim()) || r.orthonormality_defect() > tol.max(T::default_residual_tol()) {
                return Err(ScalingError::NotOrthogonal { space: i });
            }
        }
        offsets.push(acc);
        let mut st = Self {
            ell: arr.ambient(),
            bases: arr.spaces().iter().map(|s| s.basis().clone()).collect(),
            p: p.to_vec(),
            offsets,
            t,
            rot,
            x: Vec::new(),
            xmat: Matrix::zeros(0, 0),
            m: Matrix::zeros(0, 0),
            logdet: T::zero(),
            grad: Vec::new(),
        };
        st.refresh()?;
        Ok(st)
    }

    fn refresh(&mut self) -> Result<(), ScalingError<T>> {
        self.x = self.rot.iter().zip(&self.bases).map(|(r, b)| r.transpose_mul(b)).collect();
        let l = self.ell;
        let mut xm = Matrix::<T>::zeros(l, l);
        for (i, xi) in self.x.iter().enumerate() {
            for (j, row) in xi.row_iter().enumerate() {
                let w = self.t[self.offsets[i] + j].exp();
                for a in 0..l {
                    let wa = w * row[a];
                    if wa == T::zero() {
                        continue;
                    }
                    for b in 0..l {
                        xm[(a, b)] += wa * row[b];
                    }
                }
            }
        }
        let xm = xm.symmetrized();
        let eig = SymmetricEigen::new(&xm);
        let (lo, hi) = (eig.values[0], eig.values[l - 1]);
        if !(lo > hi * T::epsilon() * T::lit(16.0) * T::from_count(l)) {
            return Err(ScalingError::Degenerate { min_eig: lo.as_f64(), max_eig: hi.as_f64() });
        }
        self.logdet = eig.values.iter().map(|v| v.ln()).sum();
        self.m = eig.map_values(|v| T::one() / v.sqrt());
        self.xmat = xm;
        let mut grad = Vec::with_capacity(self.t.len());
        for (i, xi) in self.x.iter().enumerate() {
            for (j, row) in xi.row_iter().enumerate() {
                let mx = self.m.mul_vec(row);
                grad.push(self.p[i] - self.t[self.offsets[i] + j].exp() * dot(&mx, &mx));
            }
        }
        self.grad = grad;
        Ok(())
    }

    /// Same rotations, new `t`.
    pub fn with_t(&self, t: Vec<T>) -> Result<Self, ScalingError<T>> {
        let mut s = self.clone();
        s.t = t;
        s.refresh()?;
        Ok(s)
    }

    fn with_rotation(&self, i: usize, r: Matrix<T>) -> Result<Self, ScalingError<T>> {
        let mut s = self.clone();
        s.rot[i] = r;
        s.refresh()?;
        Ok(s)
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.ell
    }

    /// `m = sum_i k_i`.
    #[inline]
    pub fn m_total(&self) -> usize {
        self.t.len()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.bases.len()
    }

    #[inline]
    pub fn dim(&self, i: usize) -> usize {
        self.bases[i].rows()
    }

    #[inline]
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    #[inline]
    pub fn t(&self) -> &[T] {
        &self.t
    }

    #[inline]
    pub fn p(&self) -> &[T] {
        &self.p
    }

    /// `gamma_ij = p_i` in flat order.
    pub fn gamma(&self) -> Vec<T> {
        (0..self.n()).flat_map(|i| std::iter::repeat_n(self.p[i], self.dim(i))).collect()
    }

    #[inline]
    pub fn rotations(&self) -> &[Matrix<T>] {
        &self.rot
    }

    /// Rows are `x_i1, ..., x_ik_i`.
    #[inline]
    pub fn x(&self, i: usize) -> &Matrix<T> {
        &self.x[i]
    }

    #[inline]
    pub fn x_matrix(&self) -> &Matrix<T> {
        &self.xmat
    }

    /// `M = X^{-1/2}` (symmetric root).
    #[inline]
    pub fn m(&self) -> &Matrix<T> {
        &self.m
    }

    /// `f(t, R) = <gamma, t> - ln det X`.
    pub fn value(&self) -> T {
        dot(&self.gamma(), &self.t) - self.logdet
    }

    /// `eps_ij = p_i - e^{t_ij} |M x_ij|^2`.
    #[inline]
    pub fn gradient(&self) -> &[T] {
        &self.grad
    }

    pub fn max_gradient(&self) -> T {
        self.grad.iter().fold(T::zero(), |m, g| m.max(g.abs()))
    }

    /// Rows `M x_ij` for space `i`.
    pub fn mapped(&self, i: usize) -> Matrix<T> {
        self.x[i].mul_transpose(&self.m)
    }

    /// Largest `|cos|` between `M x_ij` and `M x_ij'`, `j != j'`, over all spaces.
    pub fn orthogonality_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n() {
            let y = self.mapped(i);
            let g = y.mul_transpose(&y);
            for a in 0..g.rows() {
                for b in a + 1..g.rows() {
                    worst = worst.max(g[(a, b)].abs() / (g[(a, a)] * g[(b, b)]).sqrt());
                }
            }
        }
        worst
    }

    /// Rows `y_a = e^{t_a / 2} M x_a` in flat order.
    pub fn scaled_images(&self) -> Matrix<T> {
        let mut y = Matrix::zeros(self.m_total(), self.ell);
        for i in 0..self.n() {
            let mi = self.mapped(i);
            for j in 0..self.dim(i) {
                let a = self.offsets[i] + j;
                let w = (self.t[a] / T::lit(2.0)).exp();
                for (o, &v) in y.row_mut(a).iter_mut().zip(mi.row(j)) {
                    *o = w * v;
                }
            }
        }
        y
    }

    /// `max |(sum_ij e^{t_ij} (M x_ij)(M x_ij)^T - I)_ab|`.
    pub fn identity_residual(&self) -> T {
        let y = self.scaled_images();
        let g = y.transpose_mul(&y);
        g.sub(&Matrix::identity(self.ell)).max_abs()
    }
}

/// Closed-form `df/dt_ij`.
pub fn t_gradient<T: Real>(state: &ScalingState<T>) -> Vec<T> {
    state.gradient().to_vec()
}

/// Partition of `0..k` into classes of `t` values within `tie_tol` of their
/// sorted neighbour.
fn tie_classes<T: Real>(t: &[T], tie_tol: T) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..t.len()).collect();
    idx.sort_by(|&a, &b| t[a].partial_cmp(&t[b]).unwrap().then(a.cmp(&b)));
    let mut out: Vec<Vec<usize>> = Vec::new();
    for &j in &idx {
        match out.last_mut() {
            Some(cls) if (t[j] - t[*cls.last().unwrap()]).abs() <= tie_tol => cls.push(j),
            _ => out.push(vec![j]),
        }
    }
    out
}

/// Within every class of tied `t_ij`, rotates the basis so that the vectors
/// `M x_ij` become pairwise orthogonal. `X`, `M` and `f` are unchanged.
pub fn r_step<T: Real>(state: &ScalingState<T>, tie_tol: T) -> Result<ScalingState<T>, ScalingError<T>> {
    let mut out = state.clone();
    let mut changed = false;
    for i in 0..state.n() {
        let k = state.dim(i);
        if k < 2 {
            continue;
        }
        let off = state.offset(i);
        let mapped = state.mapped(i);
        let mut r = state.rot[i].clone();
        for cls in tie_classes(&state.t[off..off + k], tie_tol) {
            if cls.len() < 2 {
                continue;
            }
            let y = mapped.select_rows(&cls);
            let q = Svd::new(&y).u;
            if q.shape() != (cls.len(), cls.len()) || q.orthonormality_defect() > T::default_residual_tol() {
                continue;
            }
            let block = r.select_cols(&cls).matmul(&q);
            for row in 0..k {
                for (c, &j) in cls.iter().enumerate() {
                    r[(row, j)] = block[(row, c)];
                }
            }
            changed = true;
        }
        out.rot[i] = r;
    }
    if changed {
        out.refresh()?;
    }
    Ok(out)
}

/// For each space in turn, the rotation `R_i` maximizing `f` with everything
/// else fixed. With `H = B_i X^{-1} B_i^T` and `C_0 = R_i E_i R_i^T`, `f` depends
/// on `C = R E R^T` through `-ln det(H^{-1} - C_0 + C)`; the minimizing `C`
/// shares eigenvectors with `H^{-1} - C_0`, pairing its largest eigenvalues
/// with the largest `t_ij`. A candidate is kept only if `f` does not drop.
pub fn rotation_step<T: Real>(state: &ScalingState<T>) -> Result<ScalingState<T>, ScalingError<T>> {
    let mut cur = state.clone();
    for i in 0..state.n() {
        let k = cur.dim(i);
        if k < 2 {
            continue;
        }
        let off = cur.offset(i);
        let ti: Vec<T> = cur.t[off..off + k].to_vec();
        let y = cur.bases[i].mul_transpose(&cur.m);
        let h = y.mul_transpose(&y);
        let hinv = SymmetricEigen::new(&h).map_values(|v| T::one() / v);
        let r = &cur.rot[i];
        let e = Matrix::from_diagonal(&ti.iter().map(|v| v.exp()).collect::<Vec<_>>());
        let c0 = r.matmul(&e).mul_transpose(r);
        let eig = SymmetricEigen::new(&hinv.sub(&c0));
        // j with the r-th largest t gets the eigenvector of the r-th largest eigenvalue
        let mut by_t: Vec<usize> = (0..k).collect();
        by_t.sort_by(|&a, &b| ti[b].partial_cmp(&ti[a]).unwrap().then(a.cmp(&b)));
        let mut newr = Matrix::zeros(k, k);
        for (rank, &j) in by_t.iter().enumerate() {
            let col = eig.vectors.column(k - 1 - rank);
            for row in 0..k {
                newr[(row, j)] = col[row];
            }
        }
        let cand = cur.with_rotation(i, newr)?;
        let f0 = cur.value();
        if cand.value() >= f0 - T::lit(1e-12) * f0.abs().max(T::one()) {
            cur = cand;
        }
    }
    Ok(cur)
}
