use crate::arrangement::{tau_separated, Arrangement, Subspace};
use crate::certifier::{
    beta_floor, min_witness, separated_certificate, widen, CertParams, Certificate, CertifyError, CollapseBranch,
    Outcome, Wide,
};
use crate::dependency::{prune_low_degree, validate_system, DepSet, TripleSystem};
use crate::linalg::{rank, Matrix, Tolerance};
use crate::rational::{format_rational, Rational};
use crate::scalar::Real;
use crate::scaling::{
    admissible_hull_vector, barthe_scale, sample_admissible_with_workers, AdmissibleSample, OptimizeOptions,
};

/// Branch selector used to exercise the collapse paths below the entry bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Sample,
    Scale,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecomposeOptions {
    pub beta: Rational,
    pub trials: usize,
    pub seed: u64,
    pub workers: Option<usize>,
    /// Fresh sampling rounds tried for the prefix harvest before scaling.
    pub retries: usize,
    /// Skip the entry check and go straight to one branch.
    pub force: Option<Branch>,
}

impl DecomposeOptions {
    pub fn new(beta: Rational) -> Self {
        Self { beta, trials: 4096, seed: 0, workers: None, retries: 3, force: None }
    }
}

/// `400 alpha k^3 / (beta delta)`.
pub fn entry_bound(alpha: u64, k: usize, beta: &Rational, delta: &Rational) -> Wide {
    let k3 = (k as u128).pow(3);
    Wide::from_integer(400 * alpha as u128 * k3) / (widen(beta) * widen(delta))
}

fn params<T: Real>(arr: &Arrangement<T>, sys: &TripleSystem, beta: Rational, d: usize) -> CertParams {
    CertParams { alpha: sys.alpha(), delta: sys.delta(), beta, k: arr.max_dim(), n: arr.n(), d }
}

/// A unit vector of `v` lying in `s`, if the two meet nontrivially.
fn meet_direction<T: Real>(v: &Subspace<T>, s: &Subspace<T>, tol: &Tolerance<T>) -> Option<Vec<T>> {
    if v.is_zero() || s.is_zero() || v.sum_dim(s, tol) == v.dim() + s.dim() {
        return None;
    }
    v.closest_direction(s).map(|(z, _)| z)
}

/// Collapse witness from one sampled run: every space meeting the span of
/// the first `t` picks (or of the whole run, when that span is small enough).
fn harvest<T: Real>(
    arr: &Arrangement<T>,
    sample: &AdmissibleSample,
    t: usize,
    cap: usize,
    need: u64,
    tol: &Tolerance<T>,
) -> Option<(Vec<usize>, Matrix<T>, usize)> {
    let l = arr.ambient();
    for run in &sample.sets {
        let mut prefixes = vec![&run[..t.min(run.len())]];
        if run.len() > t {
            prefixes.push(&run[..]);
        }
        for pre in prefixes {
            let s = Subspace::sum(l, pre.iter().map(|&i| arr.space(i)), tol);
            if s.dim() > cap {
                continue;
            }
            let mut idx = Vec::new();
            let mut z = Matrix::zeros(0, l);
            for i in 0..arr.n() {
                if let Some(v) = meet_direction(arr.space(i), &s, tol) {
                    idx.push(i);
                    z.push_row(&v);
                }
            }
            if (idx.len() as u64) < need {
                continue;
            }
            let w = rank(&z, tol);
            if w <= cap {
                return Some((idx, z, w));
            }
        }
    }
    None
}

/// Pulled-back witness from the scaled arrangement: drop sets with a pair
/// that is not 1/2-separated after scaling, prune to an `(alpha, delta/20)`
/// system and take one basis vector of each surviving original space.
fn scale_branch<T: Real>(
    arr: &Arrangement<T>,
    sys: &TripleSystem,
    sample: &AdmissibleSample,
    cap: usize,
    need: u64,
    tol: &Tolerance<T>,
) -> Result<(Vec<usize>, Matrix<T>, usize), CertifyError> {
    let hull = admissible_hull_vector(sample);
    let opts = OptimizeOptions { eps: T::one(), ..Default::default() };
    let (_, map, m, bound) = barthe_scale(arr, &hull, &opts, tol)?;
    if let Some(ob) = map.obstruction {
        return Err(CertifyError::Inconclusive(format!("scaling obstructed: {ob:?}")));
    }
    if bound > T::lit(2.0) + tol.residual_tol() {
        return Err(CertifyError::Check(format!("projection bound {bound} exceeds 2")));
    }
    let images: Vec<Subspace<T>> = arr.spaces().iter().map(|s| Subspace::span(&s.basis().mul_transpose(&m), tol)).collect();
    let scaled = Arrangement::new(arr.ambient(), images)?;
    let half = T::lit(0.5);
    let kept: Vec<DepSet> = sys
        .sets()
        .iter()
        .filter(|s| s.pairs().iter().all(|&(a, b)| tau_separated(scaled.space(a), scaled.space(b), half)))
        .cloned()
        .collect();
    let good = TripleSystem::new(sys.n(), kept, sys.alpha(), sys.delta())?;
    let tenth = sys.delta() / Rational::from_integer(10);
    let pruned = prune_low_degree(&scaled, &good, tenth, tol)
        .map_err(|e| CertifyError::Inconclusive(format!("pruning after bad-pair removal failed: {e}")))?;
    let sep = separated_certificate(&pruned.arrangement, &pruned.system, Rational::new(1, 2), tol)?;
    sep.verify(&pruned.arrangement, tol)?;
    let idx = pruned.kept;
    if (idx.len() as u64) < need {
        return Err(CertifyError::Inconclusive(format!("{} spaces survive pruning, need {need}", idx.len())));
    }
    let mut z = Matrix::zeros(0, arr.ambient());
    for &i in &idx {
        z.push_row(arr.space(i).basis().row(0));
    }
    let w = rank(&z, tol);
    if w > cap {
        return Err(CertifyError::Inconclusive(format!(
            "pulled-back span has dimension {w} > floor(beta d) = {cap}"
        )));
    }
    Ok((idx, z, w))
}

/// One application of the bound/collapse dichotomy.
pub fn decompose_step<T: Real>(
    arr: &Arrangement<T>,
    sys: &TripleSystem,
    opts: &DecomposeOptions,
    tol: &Tolerance<T>,
) -> Result<Certificate<T>, CertifyError> {
    let beta = opts.beta;
    if !(beta > Rational::from_integer(0) && beta < Rational::from_integer(1)) {
        return Err(CertifyError::Precondition(format!("beta = {} outside (0, 1)", format_rational(&beta))));
    }
    let report = validate_system(arr, sys, tol);
    if !report.is_valid() {
        return Err(crate::dependency::DependencyError::Invalid(report).into());
    }
    let (n, k) = (arr.n(), arr.max_dim());
    let d = arr.dimension(tol);
    let params = params(arr, sys, beta, d);
    let entry = entry_bound(sys.alpha(), k, &beta, &sys.delta());
    if opts.force.is_none() && Wide::from_integer(d as u128) <= entry {
        return Ok(Certificate {
            outcome: Outcome::Bound { d_bound: entry.floor().to_integer(), evidence: Vec::new() },
            params,
        });
    }
    if k == 0 || d == 0 {
        return Err(CertifyError::Inconclusive("all spaces are zero".into()));
    }
    let cap = beta_floor(&beta, d);
    let need = min_witness(sys.alpha(), &sys.delta(), n).max(1);
    // t = ceil(beta d / (2k))
    let t = (widen(&beta) * Wide::from_integer(d as u128) / Wide::from_integer(2 * k as u128)).ceil().to_integer()
        as usize;
    let theta = wide_f64(&(widen(&beta) * Wide::from_integer(d as u128) / Wide::from_integer(4 * (k * n) as u128)));
    let x_min = crate::rational::to_f64(&sys.delta()) * n as f64 / (10.0 * sys.alpha().max(1) as f64);

    let mut last = None;
    let mut notes = Vec::new();
    for attempt in 0..=opts.retries {
        let seed = opts.seed.wrapping_add(attempt as u64);
        let sample = sample_admissible_with_workers(arr, opts.trials, seed, opts.workers, tol)?;
        let below = sample
            .p_hat
            .iter()
            .filter(|&&p| p + 3.0 * (p * (1.0 - p) / sample.trials as f64).sqrt() < theta)
            .count();
        let try_sample = match opts.force {
            Some(Branch::Sample) => true,
            Some(Branch::Scale) => false,
            None => below as f64 >= x_min,
        };
        if !try_sample {
            last = Some(sample);
            break;
        }
        if let Some((indices, z, w_dim)) = harvest(arr, &sample, t, cap, need, tol) {
            let cert = Certificate {
                outcome: Outcome::Collapse { indices, z, w_dim, branch: CollapseBranch::Sample },
                params,
            };
            cert.verify(arr, tol)?;
            return Ok(cert);
        }
        notes.push(format!("seed {seed}: {below} indices below threshold, no prefix harvest"));
        last = Some(sample);
    }
    if opts.force == Some(Branch::Sample) {
        return Err(CertifyError::Inconclusive(notes.join("; ")));
    }
    let sample = last.expect("at least one sampling round");
    match scale_branch(arr, sys, &sample, cap, need, tol) {
        Ok((indices, z, w_dim)) => {
            let cert = Certificate {
                outcome: Outcome::Collapse { indices, z, w_dim, branch: CollapseBranch::Scale },
                params,
            };
            cert.verify(arr, tol)?;
            Ok(cert)
        }
        Err(e) => {
            notes.push(match e {
                CertifyError::Inconclusive(m) => m,
                other => other.to_string(),
            });
            Err(CertifyError::Inconclusive(notes.join("; ")))
        }
    }
}

fn wide_f64(r: &Wide) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{generate, GeneratorSpec};
    use crate::dependency::build_sg_system;

    #[test]
    fn grouped_entry_bound() {
        let tol = Tolerance::<f64>::default();
        let spec = GeneratorSpec::Grouped { k: 1, delta: Rational::new(1, 4), n: 16, ambient: None };
        let arr = generate(&spec, 1, &tol).unwrap();
        let sys = build_sg_system(&arr, 1, &tol).unwrap();
        let cert = decompose_step(&arr, &sys, &DecomposeOptions::new(Rational::new(1, 2)), &tol).unwrap();
        assert!(cert.is_bound());
        cert.verify(&arr, &tol).unwrap();
    }

    #[test]
    fn entry_bound_value() {
        // 400 * 6 * 1 / (1/2 * 1/4) = 19200
        assert_eq!(entry_bound(6, 1, &Rational::new(1, 2), &Rational::new(1, 4)), Wide::from_integer(19200));
    }
}
