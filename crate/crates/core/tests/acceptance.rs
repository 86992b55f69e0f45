//! The acceptance criteria, one `PASS`/`FAIL` line each. Run with
//! `cargo test -p sgdim-core --test acceptance -- --nocapture` to see the report.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::{random_arrangement, random_state, rng, separated_groups};
use num_rational::Ratio;
use rand::Rng;
use sgdim::arrangement::{complex_dimension, complex_to_real, generate, generate_complex_planted, Arrangement, GeneratorSpec};
use sgdim::certifier::{certify, separated_certificate, CertifyOptions, Outcome};
use sgdim::certifier::Branch;
use sgdim::dependency::{build_sg_system, build_triple_family, validate_system, DependencyError, TripleSystem};
use sgdim::linalg::{cauchy_binet_check, determinant, rank, spectral_norm, Matrix, Tolerance};
use sgdim::rational::Rational;
use sgdim::scaling::{
    admissible_hull_vector, barthec_form, is_admissible, optimize, r_step, sample_admissible, t_gradient,
    OptimizeOptions,
};

type Wide = Ratio<u128>;
type Report = Result<String, String>;

/// Instances collected for the end-to-end soundness check.
#[derive(Default)]
struct Pool {
    instances: Vec<(String, Arrangement<f64>, TripleSystem)>,
}

impl Pool {
    fn push(&mut self, name: String, arr: Arrangement<f64>, sys: TripleSystem) {
        self.instances.push((name, arr, sys));
    }
}

fn tol() -> Tolerance<f64> {
    Tolerance::default()
}

fn wide(r: &Rational) -> Wide {
    Wide::new(*r.numer() as u128, *r.denom() as u128)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, secs: f64) -> Result<(), String> {
    let t = start.elapsed().as_secs_f64();
    ensure(t < secs, || format!("took {t:.2} s, limit {secs} s"))
}

/// Oracle: degrees and pair multiplicities counted directly from the sets.
fn counts(sys: &TripleSystem) -> (Vec<usize>, usize) {
    let n = sys.n();
    let mut deg = vec![0; n];
    let mut pair = std::collections::HashMap::new();
    for s in sys.sets() {
        let idx = s.indices();
        for &i in idx {
            deg[i] += 1;
        }
        for a in 0..idx.len() {
            for b in a + 1..idx.len() {
                let key = (idx[a].min(idx[b]), idx[a].max(idx[b]));
                *pair.entry(key).or_insert(0usize) += 1;
            }
        }
    }
    (deg, pair.values().copied().max().unwrap_or(0))
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

fn lower_bound_construction(pool: &mut Pool) -> Report {
    let tol = tol();
    let mut notes = Vec::new();
    for (k, delta) in [(1usize, Rational::new(1, 4)), (2, Rational::new(1, 5)), (3, Rational::new(1, 8))] {
        let start = Instant::now();
        let spec = GeneratorSpec::Grouped { k, delta, n: 40, ambient: None };
        let arr = generate(&spec, 1, &tol).map_err(|e| e.to_string())?;
        let expected = 2 * k * ceil_div(*delta.denom(), *delta.numer()) as usize;
        let d = rank(&arr.stacked(), &tol);
        ensure(d == expected, || format!("k {k}: measured {d}, expected {expected}"))?;
        let sys = build_sg_system(&arr, k, &tol).map_err(|e| e.to_string())?;
        let (bound, trace) = certify(&arr, &sys, &CertifyOptions::default(), &tol).map_err(|e| e.to_string())?;
        ensure(bound >= d as u128 && trace.measured == d, || format!("k {k}: bound {bound} < {d}"))?;
        within(start, 10.0)?;
        notes.push(format!("k={k} d={d} bound={bound}"));
        pool.push(format!("grouped k={k}"), arr, sys);
    }
    Ok(notes.join(", "))
}

fn counterexample() -> Report {
    let start = Instant::now();
    let tol = tol();
    let arr = generate::<f64>(&GeneratorSpec::Grid { ell: 10 }, 0, &tol).map_err(|e| e.to_string())?;
    let d = rank(&arr.stacked(), &tol);
    ensure(arr.n() == 45 && d == 10, || format!("n {} d {d}", arr.n()))?;
    ensure(d * d > arr.n(), || "dimension not above sqrt(n)".into())?;
    match build_sg_system(&arr, 2, &tol) {
        Err(DependencyError::IntersectingPair(i, j)) => {
            within(start, 5.0)?;
            Ok(format!("n=45 d=10, rejected on pair ({i}, {j})"))
        }
        other => Err(format!("expected an intersecting-pair rejection, got {other:?}")),
    }
}

fn triple_family() -> Report {
    let start = Instant::now();
    for r in 3..=50usize {
        let fam = build_triple_family(r).map_err(|e| e.to_string())?;
        ensure(fam.len() == r * r - r, || format!("r {r}: {} triples", fam.len()))?;
        let mut per = vec![0usize; r];
        let mut pair = vec![0usize; r * r];
        for t in &fam {
            ensure(t[0] != t[1] && t[1] != t[2] && t[0] != t[2] && t.iter().all(|&x| x < r), || {
                format!("r {r}: bad triple {t:?}")
            })?;
            for &x in t {
                per[x] += 1;
            }
            for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                pair[a.min(b) * r + a.max(b)] += 1;
            }
        }
        ensure(per.iter().all(|&c| c == 3 * (r - 1)), || format!("r {r}: element counts {per:?}"))?;
        let worst = pair.iter().copied().max().unwrap();
        ensure(worst <= 6, || format!("r {r}: pair multiplicity {worst}"))?;
    }
    within(start, 5.0)?;
    Ok("r = 3..50".into())
}

fn system_construction(pool: &mut Pool) -> Report {
    let start = Instant::now();
    let tol = tol();
    let mut positive = 0;
    for seed in 0..50u64 {
        let k = 1 + (seed % 3) as usize;
        let base = 2 + ((seed / 3) % 3) as usize;
        let n = rng(seed).random_range(base + 3..=30);
        let spec = GeneratorSpec::RandomPlanted { n, k, ell: base * k, triples: n - base };
        let arr = generate(&spec, seed, &tol).map_err(|e| format!("seed {seed}: {e}"))?;
        let sys = build_sg_system(&arr, k, &tol).map_err(|e| format!("seed {seed}: {e}"))?;
        let report = validate_system(&arr, &sys, &tol);
        ensure(report.is_valid(), || format!("seed {seed}: {report}"))?;
        let (deg, alpha) = counts(&sys);
        let min_deg = *deg.iter().min().unwrap() as u64;
        // measured delta is min degree / n
        ensure(sys.delta() == Rational::new(min_deg, n as u64), || format!("seed {seed}: delta {}", sys.delta()))?;
        ensure(alpha as u64 <= sys.alpha(), || format!("seed {seed}: multiplicity {alpha}"))?;
        // delta n^2 / 3 <= w <= alpha n^2 / 2 with delta = min_deg / n
        let w = sys.sets().len() as u64;
        let n = n as u64;
        ensure(min_deg * n <= 3 * w && 2 * w <= alpha as u64 * n * n, || {
            format!("seed {seed}: w {w}, min degree {min_deg}, alpha {alpha}, n {n}")
        })?;
        if min_deg > 0 {
            positive += 1;
            pool.push(format!("planted seed {seed}"), arr, sys);
        }
    }
    within(start, 30.0)?;
    Ok(format!("50 instances, {positive} with delta > 0"))
}

fn scaling_correctness() -> Report {
    let start = Instant::now();
    let tol = tol();
    let mut r = rng(505);
    let (mut done, mut worst_gap, mut worst_id) = (0, 0.0f64, 0.0f64);
    while done < 25 {
        let ell: usize = r.random_range(2..=8);
        let n = r.random_range(2..=10);
        let arr = random_arrangement(&mut r, n, 3, ell);
        if arr.dimension(&tol) < ell {
            continue;
        }
        let sample = sample_admissible(&arr, 4096, done as u64, &tol).map_err(|e| e.to_string())?;
        let model = barthec_form(&arr, &admissible_hull_vector(&sample), &tol).map_err(|e| e.to_string())?;
        let map = optimize(&model.model, &model.p, &OptimizeOptions::default(), &tol).map_err(|e| e.to_string())?;
        ensure(map.converged(), || format!("instance {done}: {:?}", map.obstruction))?;
        // oracle gap: spectral norm of sum p_i Proj_{M V_i} - I
        let d = model.model.ambient();
        let mut s = Matrix::<f64>::zeros(d, d);
        for (i, sp) in model.model.spaces().iter().enumerate() {
            if model.p[i] == 0.0 || sp.dim() == 0 {
                continue;
            }
            let img = sgdim::Subspace::span(&sp.basis().mul_transpose(&map.m), &tol);
            s = s.add(&img.basis().transpose_mul(img.basis()).scale(model.p[i]));
        }
        let gap = spectral_norm(&s.sub(&Matrix::identity(d)));
        // oracle identity: sum e^t (M x)(M x)^T
        let st = map.state.as_ref().ok_or("no final state")?;
        let mut id = Matrix::<f64>::zeros(st.ambient(), st.ambient());
        for i in 0..st.n() {
            for j in 0..st.dim(i) {
                let y = st.m().mul_vec(st.x(i).row(j));
                let w = st.t()[st.offset(i) + j].exp();
                id = id.add(&Matrix::from_fn(y.len(), y.len(), |a, b| w * y[a] * y[b]));
            }
        }
        let idr = id.sub(&Matrix::identity(st.ambient())).max_abs();
        ensure(gap <= 1e-6, || format!("instance {done}: gap {gap:e}"))?;
        ensure(idr <= 1e-7, || format!("instance {done}: identity residual {idr:e}"))?;
        worst_gap = worst_gap.max(gap);
        worst_id = worst_id.max(idr);
        done += 1;
    }
    within(start, 60.0)?;
    Ok(format!("25 instances, max gap {worst_gap:.1e}, max identity residual {worst_id:.1e}"))
}

fn gradient_fidelity() -> Report {
    let start = Instant::now();
    let mut r = rng(606);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for s in 0..100 {
        let st = random_state(&mut r);
        let g = t_gradient(&st);
        for a in 0..st.m_total() {
            let (mut tp, mut tm) = (st.t().to_vec(), st.t().to_vec());
            tp[a] += h;
            tm[a] -= h;
            let fp = st.with_t(tp).map_err(|e| e.to_string())?.value();
            let fm = st.with_t(tm).map_err(|e| e.to_string())?.value();
            let err = ((fp - fm) / (2.0 * h) - g[a]).abs();
            ensure(err <= 1e-5, || format!("state {s}, coordinate {a}: error {err:e}"))?;
            worst = worst.max(err);
        }
    }
    within(start, 10.0)?;
    Ok(format!("100 states, max error {worst:.1e}"))
}

fn r_step_stationarity() -> Report {
    let start = Instant::now();
    let mut r = rng(707);
    let (mut worst_ip, mut worst_f) = (0.0f64, 0.0f64);
    for s in 0..100 {
        let st = random_state(&mut r);
        // tie every coordinate inside a space so each space is one class
        let mut t = st.t().to_vec();
        for i in 0..st.n() {
            let off = st.offset(i);
            for j in 1..st.dim(i) {
                t[off + j] = t[off];
            }
        }
        let st = st.with_t(t).map_err(|e| e.to_string())?;
        let out = r_step(&st, 1e-9).map_err(|e| e.to_string())?;
        let (f0, f1) = (st.value(), out.value());
        let rel = (f1 - f0).abs() / f0.abs().max(1.0);
        ensure(rel <= 1e-10, || format!("state {s}: f moved by {rel:e}"))?;
        for i in 0..out.n() {
            let y: Vec<Vec<f64>> = (0..out.dim(i)).map(|j| out.m().mul_vec(out.x(i).row(j))).collect();
            for a in 0..y.len() {
                for b in a + 1..y.len() {
                    let ip: f64 = y[a].iter().zip(&y[b]).map(|(u, v)| u * v).sum::<f64>().abs();
                    ensure(ip <= 1e-8, || format!("state {s}, space {i}: inner product {ip:e}"))?;
                    worst_ip = worst_ip.max(ip);
                }
            }
        }
        worst_f = worst_f.max(rel);
    }
    within(start, 10.0)?;
    Ok(format!("100 states, max inner product {worst_ip:.1e}, max relative f change {worst_f:.1e}"))
}

/// Oracle: exact integer determinant by cofactor expansion.
fn det_exact(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<i128>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &v)| v).collect()).collect();
                let sign = if c % 2 == 0 { 1 } else { -1 };
                sign * m[0][c] * det_exact(&minor)
            })
            .sum(),
    }
}

fn cauchy_binet() -> Report {
    let start = Instant::now();
    let mut r = rng(808);
    let mut worst = 0.0f64;
    for inst in 0..100 {
        let ell = r.random_range(1..=3usize);
        let m = r.random_range(1..=8usize);
        let a: Vec<Vec<i128>> = (0..ell).map(|_| (0..m).map(|_| r.random_range(-5..=5)).collect()).collect();
        let b: Vec<Vec<i128>> = (0..m).map(|_| (0..ell).map(|_| r.random_range(-5..=5)).collect()).collect();
        let ab: Vec<Vec<i128>> =
            (0..ell).map(|i| (0..ell).map(|j| (0..m).map(|s| a[i][s] * b[s][j]).sum()).collect()).collect();
        let exact = det_exact(&ab) as f64;
        let to_f = |x: &Vec<Vec<i128>>, c| Matrix::from_rows(&x.iter().map(|row| row.iter().map(|&v| v as f64).collect()).collect::<Vec<_>>(), c).unwrap();
        let (am, bm) = (to_f(&a, m), to_f(&b, ell));
        let (lhs, rhs) = cauchy_binet_check(&am, &bm).map_err(|e| e.to_string())?;
        let scale = exact.abs().max(1.0);
        let err = ((lhs - exact).abs().max((rhs - exact).abs())) / scale;
        ensure(err <= 1e-9, || format!("instance {inst}: det {exact}, lhs {lhs}, rhs {rhs}"))?;
        ensure((determinant(&am.matmul(&bm)) - exact).abs() <= 1e-9 * scale, || format!("instance {inst}: determinant"))?;
        worst = worst.max(err);
    }
    within(start, 5.0)?;
    Ok(format!("100 instances, max relative error {worst:.1e}"))
}

fn rank_certificate(pool: &mut Pool) -> Report {
    let start = Instant::now();
    let tol = tol();
    let tau = Rational::new(1, 4);
    for seed in 0..20u64 {
        let mut r = rng(900 + seed);
        let k = 1 + (seed % 3) as usize;
        let groups = r.random_range(2..=4);
        let sizes: Vec<usize> = (0..groups).map(|_| r.random_range(3..=4)).collect();
        let arr = separated_groups(&mut r, k, &sizes);
        let sys = build_sg_system(&arr, k, &tol).map_err(|e| format!("seed {seed}: {e}"))?;
        let cert = separated_certificate(&arr, &sys, tau, &tol).map_err(|e| format!("seed {seed}: {e}"))?;
        let Outcome::Bound { d_bound, evidence } = &cert.outcome else {
            return Err(format!("seed {seed}: no bound"));
        };
        let ev = &evidence[0];
        let n = arr.n() as u64;
        let l = (wide(&sys.delta()) * Wide::from_integer(n as u128)).ceil().to_integer() as f64;
        let m = ev.d.rows();
        let ratio = spectral_norm(&ev.d.matmul(&ev.a)) / (spectral_norm(&ev.d) * spectral_norm(&ev.a));
        ensure(ratio <= 1e-6, || format!("seed {seed}: ||DA|| ratio {ratio:e}"))?;
        ensure((0..m).all(|s| ev.d[(s, s)] == l), || format!("seed {seed}: diagonal differs from {l}"))?;
        let mut kmass = 0.0;
        for s in 0..m {
            for t in 0..m {
                if s != t {
                    kmass += ev.d[(s, t)] * ev.d[(s, t)];
                }
            }
        }
        let budget = sys.alpha() as f64 * l * m as f64 * 4.0;
        ensure(kmass <= budget, || format!("seed {seed}: off-diagonal mass {kmass} > {budget}"))?;
        let rank_d = rank(&ev.d, &tol);
        ensure(rank_d as f64 >= (m as f64 - kmass / (l * l)).ceil(), || format!("seed {seed}: rank(D) {rank_d}"))?;
        // floor(alpha k / (tau delta))
        let thm = (Wide::from_integer(sys.alpha() as u128 * k as u128) / (wide(&tau) * wide(&sys.delta()))).floor().to_integer();
        let ra = rank(&ev.a, &tol);
        ensure(*d_bound == thm && ra as u128 <= thm, || format!("seed {seed}: rank(A) {ra}, bound {d_bound}, expected {thm}"))?;
        pool.push(format!("separated seed {seed}"), arr, sys);
    }
    within(start, 60.0)?;
    Ok("20 systems".into())
}

fn soundness(pool: &Pool) -> Report {
    let tol = tol();
    let mut rounds = 0;
    for (idx, (name, arr, sys)) in pool.instances.iter().enumerate() {
        let mut runs = vec![CertifyOptions::default()];
        // exercise the collapse bookkeeping on the grouped instances
        if name.starts_with("grouped") {
            runs.push(CertifyOptions {
                beta: Some(Rational::new(1, 2)),
                force: Some(Branch::Sample),
                forced_rounds: 1,
                seed: idx as u64,
                ..Default::default()
            });
        }
        for opts in runs {
            let (bound, trace) = certify(arr, sys, &opts, &tol).map_err(|e| format!("{name}: {e}"))?;
            let d = rank(&arr.stacked(), &tol);
            let (alpha, delta, k) = (sys.alpha() as u128, wide(&sys.delta()), arr.max_dim() as u128);
            let half = Wide::new(1, 2);
            let q = delta / Wide::from_integer(alpha * k);
            let beta = if q < half { q } else { half };
            let thm = Wide::from_integer(4u128.pow(20) * 400 * alpha * k.pow(3)) / (beta * delta);
            ensure(trace.measured == d && d as u128 <= bound, || format!("{name}: measured {d}, bound {bound}"))?;
            ensure(Wide::from_integer(bound) <= thm, || format!("{name}: bound {bound} above the 4^20 cap"))?;
            let dn: Vec<Wide> = trace.rounds.iter().map(|r| wide(&r.delta) * Wide::from_integer(r.n as u128)).collect();
            ensure(dn.windows(2).all(|w| w[0] == w[1]), || format!("{name}: delta*n not conserved"))?;
            rounds += trace.rounds.len();
        }
    }
    Ok(format!("{} instances, {rounds} rounds", pool.instances.len()))
}

/// Oracle: complex rank from the realified block `[[Re, -Im], [Im, Re]]`.
fn complex_rank(spaces: &[sgdim::arrangement::ComplexSubspace<f64>], ell: usize, tol: &Tolerance<f64>) -> usize {
    let mut rows = Matrix::zeros(0, 2 * ell);
    for s in spaces {
        for j in 0..s.dim() {
            let (re, im) = (s.re().row(j), s.im().row(j));
            let top: Vec<f64> = re.iter().copied().chain(im.iter().map(|v| -v)).collect();
            let bot: Vec<f64> = im.iter().copied().chain(re.iter().copied()).collect();
            rows.push_row(&top);
            rows.push_row(&bot);
        }
    }
    rank(&rows, tol) / 2
}

fn complex_reduction(pool: &mut Pool) -> Report {
    let start = Instant::now();
    let tol = tol();
    let mut certified = 0;
    for seed in 0..20u64 {
        let k = 1 + (seed % 2) as usize;
        let triples = 2 + (seed % 4) as usize;
        let ell = 6 * k;
        let planted = generate_complex_planted::<f64>(3 + triples, k, ell, triples, seed, &tol).map_err(|e| e.to_string())?;
        let real = complex_to_real(ell, &planted.spaces, &tol).map_err(|e| e.to_string())?;
        ensure(real.spaces().iter().all(|s| s.dim() <= 2 * k), || format!("seed {seed}: image above 2k"))?;
        let r = |xs: &[usize]| rank(&Matrix::vstack(ell, xs.iter().map(|&i| real.space(i).basis())), &tol);
        for &[a, b, c] in &planted.triples {
            let all = r(&[a, b, c]);
            ensure(r(&[a, b]) == all && r(&[a, c]) == all && r(&[b, c]) == all, || {
                format!("seed {seed}: triple ({a}, {b}, {c}) not dependent after reduction")
            })?;
        }
        let dc = complex_rank(&planted.spaces, ell, &tol);
        let dr = real.dimension(&tol);
        ensure(dc == complex_dimension(ell, &planted.spaces, &tol), || format!("seed {seed}: complex dimension"))?;
        ensure(dc <= dr, || format!("seed {seed}: dim_C {dc} > dim_R {dr}"))?;
        if let Ok(sys) = build_sg_system(&real, 2 * k, &tol) {
            if counts(&sys).0.iter().all(|&c| c > 0) {
                certified += 1;
                pool.push(format!("reduced seed {seed}"), real, sys);
            }
        }
    }
    within(start, 30.0)?;
    Ok(format!("20 arrangements, {certified} passed on to certification"))
}

fn sampler_exactness() -> Report {
    let start = Instant::now();
    let tol = tol();
    let mut r = rng(1212);
    let arr = random_arrangement(&mut r, 3, 1, 2);
    ensure(arr.spaces().iter().all(|s| s.dim() == 1), || "lines expected".into())?;
    let trials = 10_000;
    let sample = sample_admissible(&arr, trials, 12, &tol).map_err(|e| e.to_string())?;
    let sigma = (2.0 / 9.0 / trials as f64).sqrt();
    for (i, &p) in sample.p_hat.iter().enumerate() {
        ensure((p - 2.0 / 3.0).abs() <= 3.0 * sigma, || format!("p_hat[{i}] = {p}, 3 sigma = {:.4}", 3.0 * sigma))?;
    }
    for h in &sample.sets {
        let stacked = Matrix::vstack(2, h.iter().map(|&i| arr.space(i).basis()));
        let dims: usize = h.iter().map(|&i| arr.space(i).dim()).sum();
        ensure(rank(&stacked, &tol) == dims && dims == 2, || format!("set {h:?} fails the admissibility equation"))?;
        ensure(is_admissible(&arr, h, &tol), || format!("set {h:?} rejected by is_admissible"))?;
    }
    within(start, 10.0)?;
    Ok(format!("p_hat = [{:.4}, {:.4}, {:.4}]", sample.p_hat[0], sample.p_hat[1], sample.p_hat[2]))
}

fn guarded(f: impl FnOnce() -> Report) -> Report {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    })
}

#[test]
fn acceptance_criteria() {
    let mut pool = Pool::default();
    let mut results: Vec<(u8, &str, Report, f64)> = Vec::new();
    let mut run = |id: u8, name: &'static str, f: &mut dyn FnMut() -> Report| {
        let start = Instant::now();
        let r = guarded(f);
        results.push((id, name, r, start.elapsed().as_secs_f64()));
    };
    run(1, "lower-bound construction", &mut || lower_bound_construction(&mut pool));
    run(2, "grid counterexample", &mut counterexample);
    run(3, "triple family counts", &mut triple_family);
    run(4, "system construction", &mut || system_construction(&mut pool));
    run(5, "scaling correctness", &mut scaling_correctness);
    run(6, "gradient fidelity", &mut gradient_fidelity);
    run(7, "r-step stationarity", &mut r_step_stationarity);
    run(8, "cauchy-binet", &mut cauchy_binet);
    run(9, "rank certificate", &mut || rank_certificate(&mut pool));
    run(11, "complex reduction", &mut || complex_reduction(&mut pool));
    run(12, "sampler exactness", &mut sampler_exactness);
    run(10, "end-to-end soundness", &mut || soundness(&pool));
    results.sort_by_key(|r| r.0);
    let mut failed = Vec::new();
    for (id, name, r, secs) in &results {
        match r {
            Ok(note) => println!("PASS {id:>2} {name} ({secs:.2} s): {note}"),
            Err(msg) => {
                println!("FAIL {id:>2} {name} ({secs:.2} s): {msg}");
                failed.push(*id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
