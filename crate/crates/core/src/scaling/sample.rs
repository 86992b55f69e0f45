use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arrangement::Arrangement;
use crate::linalg::{orthonormalize_scaled, rank, Matrix, Svd, Tolerance};
use crate::scalar::Real;
use crate::scaling::ScalingError;

/// Outcome of repeated greedy-to-maximality runs. `sets[r]` lists trial `r`'s
/// picks in the order they were made, so every prefix is admissible too.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleSample {
    pub sets: Vec<Vec<usize>>,
    pub p_hat: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub n: usize,
}

impl AdmissibleSample {
    /// Number of trials whose set contains `i`.
    pub fn count(&self, i: usize) -> usize {
        self.sets.iter().filter(|h| h.contains(&i)).count()
    }
}

/// `dim(sum_{i in H} V_i) == sum_{i in H} dim V_i`, decided by integer rank equality.
pub fn is_admissible<T: Real>(arr: &Arrangement<T>, set: &[usize], tol: &Tolerance<T>) -> bool {
    let total: usize = set.iter().map(|&i| arr.space(i).dim()).sum();
    if total == 0 {
        return true;
    }
    let stacked = Matrix::vstack(arr.ambient(), set.iter().map(|&i| arr.space(i).basis()));
    rank(&stacked, tol) == total
}

fn one_run<T: Real>(arr: &Arrangement<T>, rng: &mut ChaCha8Rng, tol: &Tolerance<T>) -> Vec<usize> {
    let l = arr.ambient();
    // residual of each basis against the current span; eligibility only shrinks
    let mut resid: Vec<Matrix<T>> = arr.spaces().iter().map(|s| s.basis().clone()).collect();
    let mut q = Matrix::zeros(0, l);
    let mut eligible: Vec<usize> = (0..arr.n()).collect();
    let mut picked = Vec::new();
    loop {
        eligible.retain(|&i| {
            let r = &resid[i];
            r.rows() == 0 || Svd::new(r).s.last().is_some_and(|&s| s >= tol.rank_tol())
        });
        if eligible.is_empty() {
            return picked;
        }
        let i = eligible.remove(rng.random_range(0..eligible.len()));
        picked.push(i);
        if resid[i].rows() == 0 {
            continue;
        }
        // second pass against q keeps the accumulated basis orthonormal
        let mut fresh = resid[i].clone();
        fresh = fresh.sub(&fresh.mul_transpose(&q).matmul(&q));
        let fresh = orthonormalize_scaled(&fresh, T::one(), tol);
        for &j in &eligible {
            let r = &resid[j];
            resid[j] = r.sub(&r.mul_transpose(&fresh).matmul(&fresh));
        }
        for row in fresh.row_iter() {
            q.push_row(row);
        }
    }
}

/// Independent greedy runs: each adds a uniformly random space meeting the
/// current sum trivially until none is left. Trial `r` uses the ChaCha stream
/// `r` of `seed`, so the result does not depend on scheduling.
pub fn sample_admissible<T: Real>(
    arr: &Arrangement<T>,
    trials: usize,
    seed: u64,
    tol: &Tolerance<T>,
) -> Result<AdmissibleSample, ScalingError<T>> {
    sample_admissible_with_workers(arr, trials, seed, None, tol)
}

/// [`sample_admissible`] on a dedicated pool of `workers` threads (`None`: the
/// global rayon pool). The output is identical for every worker count.
pub fn sample_admissible_with_workers<T: Real>(
    arr: &Arrangement<T>,
    trials: usize,
    seed: u64,
    workers: Option<usize>,
    tol: &Tolerance<T>,
) -> Result<AdmissibleSample, ScalingError<T>> {
    if trials == 0 {
        return Err(ScalingError::Length { what: "trials", expected: 1, got: 0 });
    }
    let run = || -> Vec<Vec<usize>> {
        (0..trials)
            .into_par_iter()
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(r as u64);
                one_run(arr, &mut rng, tol)
            })
            .collect()
    };
    let sets = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| ScalingError::Pool(e.to_string()))?
            .install(run),
        None => run(),
    };
    // distinct sets are verified once each
    let mut distinct: Vec<Vec<usize>> = sets
        .iter()
        .map(|h| {
            let mut s = h.clone();
            s.sort_unstable();
            s
        })
        .collect();
    distinct.sort();
    distinct.dedup();
    if let Some(bad) = distinct.iter().find(|h| !is_admissible(arr, h, tol)) {
        return Err(ScalingError::NotAdmissible { set: bad.clone() });
    }
    let mut counts = vec![0usize; arr.n()];
    for h in &sets {
        for &i in h {
            counts[i] += 1;
        }
    }
    let p_hat = counts.iter().map(|&c| c as f64 / trials as f64).collect();
    Ok(AdmissibleSample { sets, p_hat, trials, seed, n: arr.n() })
}

/// One distinct admissible set (sorted) and how many trials produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HullTerm {
    pub set: Vec<usize>,
    pub count: usize,
}

/// `p = sum_H (count_H / trials) 1_H`: an exact convex combination of
/// admissible indicator vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct HullCertificate {
    pub p: Vec<f64>,
    pub terms: Vec<HullTerm>,
    pub trials: usize,
}

impl HullCertificate {
    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn weight(&self, term: &HullTerm) -> f64 {
        term.count as f64 / self.trials as f64
    }

    /// Counts add up to the trial total and reproduce `p` exactly.
    pub fn check(&self) -> bool {
        if self.terms.iter().map(|t| t.count).sum::<usize>() != self.trials {
            return false;
        }
        (0..self.n()).all(|i| {
            let c: usize = self.terms.iter().filter(|t| t.set.contains(&i)).map(|t| t.count).sum();
            c as f64 / self.trials as f64 == self.p[i]
        })
    }
}

pub fn admissible_hull_vector(sample: &AdmissibleSample) -> HullCertificate {
    let mut sorted: Vec<Vec<usize>> = sample
        .sets
        .iter()
        .map(|h| {
            let mut s = h.clone();
            s.sort_unstable();
            s
        })
        .collect();
    sorted.sort();
    let mut terms: Vec<HullTerm> = Vec::new();
    for s in sorted {
        match terms.last_mut() {
            Some(t) if t.set == s => t.count += 1,
            _ => terms.push(HullTerm { set: s, count: 1 }),
        }
    }
    HullCertificate { p: sample.p_hat.clone(), terms, trials: sample.trials }
}
