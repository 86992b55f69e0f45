use crate::arrangement::{Arrangement, Subspace};
use crate::linalg::{orthonormalize, rank, solve_spd_shifted, Matrix, Svd, SymmetricEigen, Tolerance};
use crate::scalar::{dot, Real};
use crate::scaling::{r_step, rotation_step, ScalingError, ScalingState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions<T> {
    /// Target operator gap; the per-coordinate gradient target is `eps / m`.
    pub eps: T,
    pub max_iter: usize,
    pub tie_tol: T,
    /// A log-scale spread beyond this is reported as divergence.
    pub t_cap: T,
}

impl<T: Real> Default for OptimizeOptions<T> {
    fn default() -> Self {
        Self { eps: T::lit(1e-6), max_iter: 10_000, tie_tol: T::lit(1e-9), t_cap: T::lit(60.0) }
    }
}

/// Why no scaling was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Obstruction {
    /// `sum_i p_i dim V_i != ambient`; `f` is unbounded along `t + c 1`.
    Weight { weight: f64, ambient: usize },
    /// The log-scales spread beyond the cap: `(space, j, sign)` for every
    /// coordinate beyond half the cap, sign `+1` for `t -> +inf`. After a
    /// rebase `j` indexes the singular directions of the space under the
    /// accumulated map, smallest stretch first.
    Divergence { coords: Vec<(usize, usize, i8)> },
}

#[derive(Debug, Clone)]
pub struct ScalingMap<T> {
    /// The accumulated map; meaningful only without obstruction.
    pub m: Matrix<T>,
    /// Measured `|| sum_i p_i Proj_{M V_i} - I ||`.
    pub achieved_eps: T,
    pub max_gradient: T,
    pub iterations: usize,
    pub obstruction: Option<Obstruction>,
    /// Indices of the spaces with `p_i > 0` and `dim V_i > 0`, in order.
    pub active: Vec<usize>,
    /// `f` at the returned map, measured over the original spaces.
    pub objective: T,
    /// Final state over the active spaces, expressed in the last rebased
    /// frame (the images of the active spaces under all earlier maps).
    pub state: Option<ScalingState<T>>,
}

impl<T: Real> ScalingMap<T> {
    pub fn converged(&self) -> bool {
        self.obstruction.is_none()
    }
}

/// `|| sum_i p_i Proj_{M V_i} - I ||` in spectral norm.
pub fn projection_gap<T: Real>(arr: &Arrangement<T>, p: &[T], m: &Matrix<T>, tol: &Tolerance<T>) -> T {
    let l = arr.ambient();
    let mut s = Matrix::identity(l).scale(-T::one());
    for (sp, &pi) in arr.spaces().iter().zip(p) {
        if sp.is_zero() || pi == T::zero() {
            continue;
        }
        let u = orthonormalize(&sp.basis().mul_transpose(m), tol);
        s = s.add(&u.transpose_mul(&u).scale(pi));
    }
    let eig = SymmetricEigen::new(&s.symmetrized());
    eig.values.iter().fold(T::zero(), |a, v| a.max(v.abs()))
}

/// Negative Hessian of `f` in `t`: `diag(K) - K o K` with `K = Y Y^T`.
fn neg_hessian<T: Real>(st: &ScalingState<T>) -> Matrix<T> {
    let y = st.scaled_images();
    let k = y.mul_transpose(&y);
    let m = k.rows();
    Matrix::from_fn(m, m, |a, b| if a == b { k[(a, a)] } else { T::zero() } - k[(a, b)] * k[(a, b)])
}

/// Backtracking line search along `dir`; `None` if no step gives an Armijo ascent.
fn line_search<T: Real>(st: &ScalingState<T>, dir: &[T]) -> Option<ScalingState<T>> {
    let g = st.gradient();
    let slope = dot(dir, g);
    if !(slope > T::zero()) {
        return None;
    }
    let f0 = st.value();
    let mut step = T::one();
    // keep the first trial step inside a sane range
    let big = dir.iter().fold(T::zero(), |a, d| a.max(d.abs()));
    if big > T::lit(10.0) {
        step = T::lit(10.0) / big;
    }
    for _ in 0..60 {
        let t: Vec<T> = st.t().iter().zip(dir).map(|(&t, &d)| t + step * d).collect();
        if let Ok(cand) = st.with_t(t) {
            let f = cand.value();
            if f.is_finite() && f >= f0 + T::lit(1e-4) * step * slope {
                return Some(cand);
            }
        }
        step = step / T::lit(2.0);
    }
    None
}

/// Spread of `|t|` that triggers a rebase.
const REBASE_AT: f64 = 3.0;

/// The same point over the mapped spaces `M V_i`, where `X = I`: per space
/// the eigenpairs of `sum_j e^{t_ij} (M x_ij)(M x_ij)^T` become the new basis
/// and log-scales. This is an exact change of variables; `f` shifts by a
/// constant.
fn rebase<T: Real>(st: &ScalingState<T>, tol: &Tolerance<T>) -> Option<(Arrangement<T>, ScalingState<T>)> {
    let l = st.ambient();
    let mut spaces = Vec::with_capacity(st.n());
    let mut t = Vec::with_capacity(st.m_total());
    for i in 0..st.n() {
        let y = st.mapped(i);
        let q = orthonormalize(&y, tol);
        if q.rows() != y.rows() {
            return None;
        }
        let z = y.mul_transpose(&q);
        let k = z.rows();
        let c = Matrix::from_fn(k, k, |a, b| {
            (0..k).map(|j| st.t()[st.offset(i) + j].exp() * z[(j, a)] * z[(j, b)]).sum::<T>()
        });
        let eig = SymmetricEigen::new(&c);
        if !eig.values.iter().all(|&v| v > T::zero()) {
            return None;
        }
        t.extend(eig.values.iter().map(|v| v.ln()));
        spaces.push(Subspace::from_orthonormal(eig.vectors.transpose_mul(&q), tol).ok()?);
    }
    let frame = Arrangement::new(l, spaces).ok()?;
    let rot = (0..st.n()).map(|i| Matrix::identity(st.dim(i))).collect();
    let next = ScalingState::from_parts(&frame, st.p(), t, rot).ok()?;
    Some((frame, next))
}

/// Log-stretch of each original coordinate under `acc`, `-2 ln sigma_ij`,
/// centred; coordinates beyond `cap / 2` in flat order with their sign.
fn divergent_coords<T: Real>(sub: &Arrangement<T>, active: &[usize], acc: &Matrix<T>, cap: T) -> Vec<(usize, usize, i8)> {
    let mut logs = Vec::new();
    for (si, &orig) in active.iter().enumerate() {
        let svd = Svd::new(&sub.space(si).basis().mul_transpose(acc));
        let mut s = svd.s.clone();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (j, v) in s.into_iter().enumerate() {
            logs.push((orig, j, -T::lit(2.0) * v.max(T::min_positive_value()).ln()));
        }
    }
    let mean = logs.iter().map(|x| x.2).sum::<T>() / T::from_count(logs.len().max(1));
    let half = cap / T::lit(2.0);
    logs.into_iter()
        .filter(|x| (x.2 - mean).abs() > half)
        .map(|(i, j, v)| (i, j, if v > mean { 1 } else { -1 }))
        .collect()
}

fn log_condition<T: Real>(m: &Matrix<T>) -> T {
    let s = Svd::new(m).s;
    let hi = s.iter().fold(T::zero(), |a, &v| a.max(v));
    let lo = s.iter().fold(T::infinity(), |a, &v| a.min(v));
    if lo > T::zero() { (hi / lo).ln() } else { T::infinity() }
}

fn recenter<T: Real>(st: ScalingState<T>) -> ScalingState<T> {
    let m = st.m_total();
    let mean = st.t().iter().copied().sum::<T>() / T::from_count(m);
    if mean.abs() < T::lit(1e-3) {
        return st;
    }
    let t = st.t().iter().map(|&v| v - mean).collect();
    st.with_t(t).unwrap_or(st)
}

/// Alternating maximization of `f`: per iteration an exact rotation update
/// followed by the tie-class orthogonalization, then a damped Newton ascent
/// step in `t`. Stops once `max |eps_ij| <= eps / m` and the measured gap is at
/// most `eps`.
pub fn optimize<T: Real>(
    arr: &Arrangement<T>,
    p: &[T],
    opts: &OptimizeOptions<T>,
    tol: &Tolerance<T>,
) -> Result<ScalingMap<T>, ScalingError<T>> {
    if p.len() != arr.n() {
        return Err(ScalingError::Length { what: "p", expected: arr.n(), got: p.len() });
    }
    if let Some((i, &v)) = p.iter().enumerate().find(|(_, &v)| !(v >= T::zero() && v <= T::one())) {
        return Err(ScalingError::ProbabilityRange { index: i, value: v.as_f64() });
    }
    let l = arr.ambient();
    let active: Vec<usize> = (0..arr.n()).filter(|&i| p[i] > T::zero() && !arr.space(i).is_zero()).collect();
    let sub = arr.select(&active);
    let dim = if active.is_empty() { 0 } else { rank(&sub.stacked(), tol) };
    if dim < l {
        return Err(ScalingError::NotSpanning { dim, ambient: l });
    }
    let psub: Vec<T> = active.iter().map(|&i| p[i]).collect();
    let weight: T = active.iter().map(|&i| p[i] * T::from_count(arr.space(i).dim())).sum();
    if (weight - T::from_count(l)).abs() > T::lit(1e-9) * T::from_count(l) {
        let m = Matrix::identity(l);
        return Ok(ScalingMap {
            achieved_eps: projection_gap(arr, p, &m, tol),
            m,
            max_gradient: T::infinity(),
            iterations: 0,
            obstruction: Some(Obstruction::Weight { weight: weight.as_f64(), ambient: l }),
            active,
            objective: T::neg_infinity(),
            state: None,
        });
    }

    let mtot = sub.total_rows();
    let gtarget = opts.eps / T::from_count(mtot);
    let mut st = ScalingState::new(&sub, &psub)?;
    // current frame, the map into it from `sub`, and the shift of f
    let mut frame = sub.clone();
    let mut acc = Matrix::identity(l);
    let mut shift = T::zero();
    let mut best = (st.clone(), frame.clone(), acc.clone(), st.value());
    let mut stalls = 0;
    let mut last_gap = T::infinity();
    let finish = |st: ScalingState<T>, acc: &Matrix<T>, shift: T, gap: T, iterations: usize, obstruction| ScalingMap {
        m: st.m().matmul(acc),
        achieved_eps: gap,
        max_gradient: st.max_gradient(),
        iterations,
        obstruction,
        active: active.clone(),
        objective: st.value() + shift,
        state: Some(st),
    };
    for iter in 0..opts.max_iter {
        st = rotation_step(&st)?;
        st = r_step(&st, opts.tie_tol)?;
        let gmax = st.max_gradient();
        if st.value() + shift >= best.3 {
            best = (st.clone(), frame.clone(), acc.clone(), st.value() + shift);
        }
        if gmax <= gtarget {
            let gap = projection_gap(&frame, &psub, st.m(), tol);
            last_gap = gap;
            if gap <= opts.eps {
                return Ok(finish(st, &acc, shift, gap, iter, None));
            }
        }
        let g = st.gradient().to_vec();
        let h = neg_hessian(&st);
        let scale = (0..mtot).fold(T::zero(), |a, i| a.max(h[(i, i)])).max(T::min_positive_value());
        let mut dir = solve_spd_shifted(&h, &g, scale * T::lit(1e-12));
        if !(dot(&dir, &g) > T::zero()) || dir.iter().any(|d| !d.is_finite()) {
            dir = g.clone();
        }
        let next = line_search(&st, &dir).or_else(|| line_search(&st, &g));
        match next {
            Some(n) => {
                st = recenter(n);
                stalls = 0;
            }
            None => {
                stalls += 1;
                if stalls >= 20 {
                    break;
                }
            }
        }
        let tmax = st.t().iter().fold(T::zero(), |a, t| a.max(t.abs()));
        if tmax > T::lit(REBASE_AT) {
            if let Some((f2, s2)) = rebase(&st, tol) {
                acc = st.m().matmul(&acc);
                shift += st.value() - s2.value();
                frame = f2;
                st = s2;
                stalls = 0;
            }
        }
        let spread = T::lit(2.0) * log_condition(&acc);
        let tmax = st.t().iter().fold(T::zero(), |a, t| a.max(t.abs()));
        if tmax > opts.t_cap || spread > opts.t_cap {
            let total = st.m().matmul(&acc);
            let coords = divergent_coords(&sub, &active, &total, opts.t_cap);
            let gap = projection_gap(&frame, &psub, st.m(), tol);
            return Ok(finish(st, &acc, shift, gap, iter + 1, Some(Obstruction::Divergence { coords })));
        }
    }
    let (best_st, best_frame, _, best_f) = best;
    let gap = if last_gap.is_finite() { last_gap } else { projection_gap(&best_frame, &psub, best_st.m(), tol) };
    Err(ScalingError::Timeout {
        iterations: opts.max_iter,
        max_grad: best_st.max_gradient().as_f64(),
        gap: gap.as_f64(),
        objective: best_f.as_f64(),
        best: Box::new(best_st),
    })
}
