use crate::arrangement::{tau_separated, Arrangement, Subspace};
use crate::certifier::{widen, CertParams, Certificate, CertifyError, DependencyMatrix, Outcome, Wide};
use crate::dependency::{validate_system, DepSet, TripleSystem};
use crate::linalg::{rank, solve_row_combination, Matrix, Tolerance};
use crate::rational::{ceil_u64, times_count, to_f64, Rational};
use crate::scalar::{dot, Real};

/// Coefficients `(lambda, mu)` of `u` in the orthonormal bases of `v1` and
/// `v2`. Separation bounds their squared sum by `|u|^2 / tau`.
pub fn coefficient_expand<T: Real>(
    u: &[T],
    v1: &Subspace<T>,
    v2: &Subspace<T>,
    tau: T,
    tol: &Tolerance<T>,
) -> Result<Vec<T>, CertifyError> {
    if !tau_separated(v1, v2, tau) {
        return Err(CertifyError::Precondition(format!(
            "spaces not tau-separated (max cosine {} > {})",
            v1.max_cosine(v2),
            T::one() - tau
        )));
    }
    let g = Matrix::vstack(v1.ambient(), [v1.basis(), v2.basis()]);
    let (c, resid) = solve_row_combination(&g, u, tol);
    let scale = dot(u, u).sqrt().max(T::one());
    if resid > tol.residual_tol() * scale {
        return Err(CertifyError::Membership { residual: resid.as_f64() });
    }
    let mass: T = c.iter().map(|&x| x * x).sum();
    let budget = dot(u, u) / tau;
    if mass > budget * (T::one() + T::lit(1e-9)) + tol.residual_tol() {
        return Err(CertifyError::Check(format!("coefficient mass {mass} exceeds {budget}")));
    }
    Ok(c)
}

/// When `v` and `w` are not `tau`-separated, a basis index `j` of `v` with
/// `|Proj_w(u_j)|^2 >= (1 - tau)^2 / dim v`, and that squared norm.
pub fn separation_witness<T: Real>(v: &Subspace<T>, w: &Subspace<T>, tau: T) -> Option<(usize, T)> {
    if tau_separated(v, w, tau) {
        return None;
    }
    (0..v.dim())
        .map(|j| (j, w.projection_norm_sq(v.basis().row(j))))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(b.0.cmp(&a.0)))
}

/// `(max(0, ceil(m - K / L^2)), L, K)` for a matrix whose diagonal equals `L > 0`.
pub fn diagdom_rank_bound<T: Real>(d: &Matrix<T>, tol: &Tolerance<T>) -> Result<(usize, T, T), CertifyError> {
    let m = d.rows();
    if m == 0 || !d.is_square() {
        return Err(CertifyError::Precondition("diagonal dominance bound needs a nonempty square matrix".into()));
    }
    let l = d[(0, 0)];
    for i in 0..m {
        if !(l > T::zero()) || (d[(i, i)] - l).abs() > tol.residual_tol() * l.max(T::one()) {
            return Err(CertifyError::NonConstantDiagonal { index: i, value: d[(i, i)].as_f64(), expected: l.as_f64() });
        }
    }
    let mut k = T::zero();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                k += d[(i, j)] * d[(i, j)];
            }
        }
    }
    let b = (T::from_count(m) - k / (l * l)).ceil();
    let bound = if b > T::zero() { b.as_f64() as usize } else { 0 };
    Ok((bound, l, k))
}

/// The rank certificate for a system whose sets contain only
/// `tau`-separated pairs: builds `A`, the annihilator `D` and emits
/// `d <= floor(alpha k / (tau delta))`.
pub fn separated_certificate<T: Real>(
    arr: &Arrangement<T>,
    sys: &TripleSystem,
    tau: Rational,
    tol: &Tolerance<T>,
) -> Result<Certificate<T>, CertifyError> {
    let n = arr.n();
    if sys.n() != n {
        return Err(CertifyError::Precondition(format!("system over {} spaces, arrangement has {n}", sys.n())));
    }
    if !(tau > Rational::from_integer(0) && tau <= Rational::from_integer(1)) {
        return Err(CertifyError::Precondition("tau must lie in (0, 1]".into()));
    }
    let delta = sys.delta();
    if delta == Rational::from_integer(0) {
        return Err(CertifyError::Precondition("delta must be positive".into()));
    }
    let report = validate_system(arr, sys, tol);
    if !report.is_valid() {
        return Err(crate::dependency::DependencyError::Invalid(report).into());
    }
    let tau_t = T::lit(to_f64(&tau));
    for (j, s) in sys.sets().iter().enumerate() {
        for (a, b) in s.pairs() {
            if !tau_separated(arr.space(a), arr.space(b), tau_t) {
                return Err(CertifyError::Precondition(format!(
                    "set {j}: spaces {a} and {b} are not tau-separated"
                )));
            }
        }
    }
    let k = arr.max_dim();
    let l = ceil_u64(&times_count(&delta, n));
    let a = arr.stacked();
    let m = a.rows();
    let mut offsets = Vec::with_capacity(n);
    let mut psi = Vec::with_capacity(m);
    for (i, s) in arr.spaces().iter().enumerate() {
        offsets.push(psi.len());
        psi.extend(std::iter::repeat_n(i, s.dim()));
    }
    let containing: Vec<Vec<usize>> = (0..n).map(|i| sys.sets_containing(i).collect()).collect();
    let mut d = Matrix::zeros(m, m);
    for s in 0..m {
        let i = psi[s];
        let j_sets = &containing[i];
        if (j_sets.len() as u64) < l {
            return Err(CertifyError::SystemDegree { index: i, have: j_sets.len(), need: l });
        }
        let u = a.row(s).to_vec();
        for &j in j_sets.iter().take(l as usize) {
            let set = &sys.sets()[j];
            let others: Vec<usize> = set.indices().iter().copied().filter(|&x| x != i).collect();
            let c = match set {
                DepSet::Triple(_) => coefficient_expand(&u, arr.space(others[0]), arr.space(others[1]), tau_t, tol)
                    .map_err(|e| CertifyError::InconsistentSystem(format!("set {j}, row {s}: {e}")))?,
                DepSet::Pair(_) => {
                    let v = arr.space(others[0]);
                    let (c, resid) = solve_row_combination(v.basis(), &u, tol);
                    if resid > tol.residual_tol() {
                        return Err(CertifyError::InconsistentSystem(format!(
                            "set {j}, row {s}: residual {:e} in a 2-set", resid.as_f64()
                        )));
                    }
                    c
                }
            };
            d[(s, s)] += T::one();
            let mut pos = 0;
            for &o in &others {
                for r in 0..arr.space(o).dim() {
                    d[(s, offsets[o] + r)] -= c[pos];
                    pos += 1;
                }
            }
        }
    }
    let (rank_lower, _, kmass) = diagdom_rank_bound(&d, tol)?;
    let tau_w = widen(&tau);
    let k_budget = T::lit(sys.alpha() as f64 * l as f64 * m as f64 / to_f64(&tau));
    let ev = DependencyMatrix { a, d, l, k_budget, k: kmass, psi, rank_lower };
    if ev.annihilation_ratio() > T::lit(1e-6) {
        return Err(CertifyError::Check(format!("||DA|| ratio {}", ev.annihilation_ratio())));
    }
    let row_budget = T::lit(sys.alpha() as f64 * l as f64 / to_f64(&tau)) + T::lit(1e-6);
    if let Some(s) = (0..m).find(|&s| ev.row_mass(s) > row_budget) {
        return Err(CertifyError::Check(format!("row {s} off-diagonal mass {} > {row_budget}", ev.row_mass(s))));
    }
    let bound: Wide =
        Wide::from_integer(sys.alpha() as u128 * k as u128) / (tau_w * widen(&delta));
    let d_bound = bound.floor().to_integer();
    let ra = rank(&ev.a, tol);
    if ra as u128 > d_bound || ra + rank_lower > m {
        return Err(CertifyError::Unsound { measured: ra, bound: d_bound });
    }
    Ok(Certificate {
        outcome: Outcome::Bound { d_bound, evidence: vec![ev] },
        params: CertParams { alpha: sys.alpha(), delta, beta: Rational::from_integer(0), k, n, d: ra },
    })
}
