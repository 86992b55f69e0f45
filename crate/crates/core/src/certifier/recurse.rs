use std::fmt;
use std::time::{Duration, Instant};

use crate::arrangement::Arrangement;
use crate::certifier::{decompose_step, entry_bound, widen, Branch, CertifyError, CollapseBranch, DecomposeOptions, Outcome, Wide};
use crate::dependency::{map_and_clean, TripleSystem};
use crate::linalg::{orthonormalize, projector, Matrix, Tolerance};
use crate::rational::{format_rational, parse_rational, times_count, Rational};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOptions {
    /// Defaults to `min(1/2, delta / (alpha k))`.
    pub beta: Option<Rational>,
    pub trials: usize,
    pub seed: u64,
    pub workers: Option<usize>,
    pub retries: usize,
    pub max_rounds: Option<usize>,
    pub time_limit: Option<Duration>,
    /// Forces a collapse branch during the first `forced_rounds` rounds.
    pub force: Option<Branch>,
    pub forced_rounds: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            beta: None,
            trials: 4096,
            seed: 0,
            workers: None,
            retries: 3,
            max_rounds: None,
            time_limit: None,
            force: None,
            forced_rounds: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRound {
    pub round: usize,
    pub n: usize,
    pub delta: Rational,
    pub d: usize,
    /// `bound`, `collapse` or `scale-collapse`.
    pub branch: String,
    pub loss: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub rounds: Vec<TraceRound>,
    pub final_bound: Option<u128>,
    pub measured: usize,
}

impl Trace {
    /// `delta_t n_t` is the same rational in every round.
    pub fn conserves_delta_n(&self) -> bool {
        let mut it = self.rounds.iter().map(|r| times_count(&r.delta, r.n));
        match it.next() {
            Some(first) => it.all(|x| x == first),
            None => true,
        }
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rounds {
            writeln!(
                f,
                "round {} n {} delta {} d {} branch {} loss {}",
                r.round,
                r.n,
                format_rational(&r.delta),
                r.d,
                r.branch,
                r.loss
            )?;
        }
        if let Some(b) = self.final_bound {
            writeln!(f, "final bound {} measured {}", b, self.measured)?;
        }
        Ok(())
    }
}

pub fn parse_trace(text: &str) -> Result<Trace, CertifyError> {
    let bad = |line: usize, msg: &str| CertifyError::Check(format!("trace line {line}: {msg}"));
    let mut trace = Trace::default();
    for (ln, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty()) {
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok.as_slice() {
            ["round", t, "n", n, "delta", d, "d", dd, "branch", b, "loss", l] => trace.rounds.push(TraceRound {
                round: t.parse().map_err(|_| bad(ln, "round"))?,
                n: n.parse().map_err(|_| bad(ln, "n"))?,
                delta: parse_rational(d).ok_or_else(|| bad(ln, "delta"))?,
                d: dd.parse().map_err(|_| bad(ln, "d"))?,
                branch: b.to_string(),
                loss: l.parse().map_err(|_| bad(ln, "loss"))?,
            }),
            ["final", "bound", b, "measured", m] => {
                trace.final_bound = Some(b.parse().map_err(|_| bad(ln, "bound"))?);
                trace.measured = m.parse().map_err(|_| bad(ln, "measured"))?;
            }
            _ => return Err(bad(ln, "unrecognized line")),
        }
    }
    Ok(trace)
}

/// `min(1/2, delta / (alpha k))`.
pub(crate) fn default_beta(alpha: u64, k: usize, delta: &Rational) -> Rational {
    let half = Rational::new(1, 2);
    if alpha == 0 || k == 0 {
        return half;
    }
    let r = *delta / Rational::from_integer(alpha * k as u64);
    if r < half {
        r
    } else {
        half
    }
}

/// The project-and-recurse driver. Each collapse round kills the span of
/// the witness vectors with `P = I - Proj_W` and maps the system along; the
/// final bound is the terminating round's entry bound plus the dimension
/// removed on the way.
pub fn certify<T: Real>(
    arr: &Arrangement<T>,
    sys: &TripleSystem,
    opts: &CertifyOptions,
    tol: &Tolerance<T>,
) -> Result<(u128, Trace), CertifyError> {
    let start = Instant::now();
    let k = arr.max_dim();
    let (alpha, delta) = (sys.alpha(), sys.delta());
    if delta == Rational::from_integer(0) {
        return Err(CertifyError::Precondition("delta must be positive".into()));
    }
    let beta = opts.beta.unwrap_or_else(|| default_beta(alpha, k, &delta));
    let round_cap = (Wide::from_integer(20 * alpha.max(1) as u128 * k.max(1) as u128) / widen(&delta)).ceil().to_integer();
    let delta_n = times_count(&delta, sys.n());
    let measured = arr.dimension(tol);
    let mut trace = Trace { rounds: Vec::new(), final_bound: None, measured };
    let mut cur_arr = arr.clone();
    let mut cur_sys = sys.clone();
    let mut lost = 0u128;
    let mut round = 0usize;
    let final_bound = loop {
        if opts.max_rounds.is_some_and(|m| round >= m) {
            return Err(CertifyError::Budget { reason: format!("{round} rounds"), trace: Box::new(trace) });
        }
        if opts.time_limit.is_some_and(|t| start.elapsed() > t) {
            return Err(CertifyError::Budget { reason: "time limit".into(), trace: Box::new(trace) });
        }
        let d = cur_arr.dimension(tol);
        let step = DecomposeOptions {
            beta,
            trials: opts.trials,
            seed: opts.seed.wrapping_add(1000 * round as u64),
            workers: opts.workers,
            retries: opts.retries,
            force: if round < opts.forced_rounds { opts.force } else { None },
        };
        let cert = decompose_step(&cur_arr, &cur_sys, &step, tol)?;
        let mut entry = TraceRound { round, n: cur_arr.n(), delta: cur_sys.delta(), d, branch: String::new(), loss: 0 };
        match cert.outcome {
            Outcome::Bound { d_bound, .. } => {
                entry.branch = "bound".into();
                trace.rounds.push(entry);
                break d_bound + lost;
            }
            Outcome::Collapse { z, w_dim, branch, .. } => {
                if round as u128 >= round_cap {
                    return Err(CertifyError::RoundCap { rounds: round + 1, cap: round_cap });
                }
                let w = orthonormalize(&z, tol);
                let p = Matrix::identity(cur_arr.ambient()).sub(&projector(&w, tol)?);
                let cleaned = map_and_clean(&cur_arr, &cur_sys, &p, tol)?;
                if times_count(&cleaned.delta, cleaned.arrangement.n()) != delta_n {
                    return Err(CertifyError::Check("delta * n not conserved".into()));
                }
                entry.branch = match branch {
                    CollapseBranch::Sample => "collapse".into(),
                    CollapseBranch::Scale => "scale-collapse".into(),
                };
                entry.loss = w_dim;
                trace.rounds.push(entry);
                lost += w_dim as u128;
                cur_arr = cleaned.arrangement;
                cur_sys = cleaned.system;
                round += 1;
            }
        }
    };
    trace.final_bound = Some(final_bound);
    if measured as u128 > final_bound {
        return Err(CertifyError::Unsound { measured, bound: final_bound });
    }
    let cap = (entry_bound(alpha, k, &beta, &delta) * Wide::from_integer(4u128.pow(20))).floor().to_integer();
    if final_bound > cap {
        return Err(CertifyError::Check(format!("final bound {final_bound} exceeds 4^20 * 400 alpha k^3 / (beta delta)")));
    }
    Ok((final_bound, trace))
}
