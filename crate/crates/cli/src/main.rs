use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sgdim::arrangement::{
    complex_dimension, complex_to_real, generate, generate_complex_planted, pairwise_zero_intersection,
    parse_arrangement, write_arrangement, write_complex_arrangement, write_matrix, Arrangement, ArrangementError,
    ArrangementFile, GeneratorSpec,
};
use sgdim::certifier::{certify, Branch, CertifyError, CertifyOptions};
use sgdim::dependency::{
    build_sg_system, dependent_triples, find_special_spaces, parse_system, validate_system, write_system,
    DependencyError, TripleSystem,
};
use sgdim::linalg::Tolerance;
use sgdim::rational::{format_rational, parse_rational, Rational};
use sgdim::scaling::{
    admissible_hull_vector, barthe_scale, sample_admissible_with_workers, OptimizeOptions, ScalingError,
};

#[derive(Parser, Debug)]
#[command(name = "sgdim", version, about = "Dependency systems, scaling and dimension certificates for subspace arrangements")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Singular values at or below this count as zero.
    #[arg(long, global = true, default_value_t = 1e-9)]
    rank_tol: f64,
    /// Tolerance for membership and orthonormality residuals.
    #[arg(long, global = true, default_value_t = 1e-8)]
    residual_tol: f64,
    /// Sampling threads (default: rayon's global pool).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 4096)]
    trials: usize,
    /// Output file; standard output when absent.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an arrangement.
    Gen(GenArgs),
    /// List dependent triples and special spaces.
    Triples {
        input: PathBuf,
        /// Dimension bound (default: largest space dimension).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Build the (6, delta) system from special spaces.
    System {
        input: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Scale the arrangement and print M with the achieved gap.
    Scale(ScaleArgs),
    /// Run the dimension certifier and write its trace.
    Certify(CertifyArgs),
    /// Realify a complex arrangement.
    Reduce { input: PathBuf },
    /// Run the invariant checks on an arrangement (and optionally a system).
    Verify {
        input: PathBuf,
        #[arg(long)]
        system: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Grouped,
    Grid,
    Planted,
    ComplexPlanted,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Rational or decimal, e.g. `1/4` or `0.25`.
    #[arg(long, value_parser = rational_arg)]
    delta: Option<Rational>,
    #[arg(long)]
    n: Option<usize>,
    /// Ambient dimension.
    #[arg(long)]
    l: Option<usize>,
    /// Planted dependent triples.
    #[arg(long, default_value_t = 0)]
    triples: usize,
}

#[derive(Args, Debug)]
struct ScaleArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 10000)]
    max_iter: usize,
    #[arg(long, default_value_t = 60.0)]
    tcap: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ForceArg {
    Sample,
    Scale,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    input: PathBuf,
    /// System file; built from the special spaces when absent.
    #[arg(long)]
    system: Option<PathBuf>,
    #[arg(long, value_parser = rational_arg)]
    beta: Option<Rational>,
    #[arg(long, default_value_t = 3)]
    retries: usize,
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Force a collapse branch in the first `--forced-rounds` rounds.
    #[arg(long, value_enum)]
    force: Option<ForceArg>,
    #[arg(long, default_value_t = 1)]
    forced_rounds: usize,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("`{s}` is not a nonnegative rational"))
}

#[derive(Debug)]
enum Failure {
    /// Invariant or certificate failure.
    Invariant(String),
    Usage(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invariant(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
        }
    }
}

impl From<ArrangementError> for Failure {
    fn from(e: ArrangementError) -> Self {
        match e {
            ArrangementError::Parse { .. } | ArrangementError::Infeasible(_) => Failure::Usage(e.to_string()),
            other => Failure::Invariant(other.to_string()),
        }
    }
}

impl From<DependencyError> for Failure {
    fn from(e: DependencyError) -> Self {
        match e {
            DependencyError::Parse { .. } | DependencyError::FamilyTooSmall(_) => Failure::Usage(e.to_string()),
            DependencyError::Arrangement(a) => a.into(),
            other => Failure::Invariant(other.to_string()),
        }
    }
}

impl From<CertifyError> for Failure {
    fn from(e: CertifyError) -> Self {
        match e {
            CertifyError::Budget { .. } | CertifyError::RoundCap { .. } => Failure::Budget(e.to_string()),
            CertifyError::Dependency(d) => d.into(),
            CertifyError::Arrangement(a) => a.into(),
            other => Failure::Invariant(other.to_string()),
        }
    }
}

impl From<ScalingError<f64>> for Failure {
    fn from(e: ScalingError<f64>) -> Self {
        match e {
            ScalingError::Timeout { .. } => Failure::Budget(e.to_string()),
            ScalingError::Arrangement(a) => a.into(),
            other => Failure::Invariant(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<ArrangementFile<f64>, Failure> {
    parse_arrangement(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_real(path: &Path, tol: &Tolerance<f64>) -> Result<Arrangement<f64>, Failure> {
    Ok(read_file(path)?.into_real(tol)?)
}

fn read_system(path: &Path) -> Result<TripleSystem, Failure> {
    parse_system(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gen(a: &GenArgs, g: &Global, tol: &Tolerance<f64>) -> Result<String, Failure> {
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| Failure::Usage(format!("--{name} is required")));
    let spec = match a.kind {
        Kind::Grouped => {
            let delta = a.delta.ok_or_else(|| Failure::Usage("--delta is required".into()))?;
            GeneratorSpec::Grouped { k: a.k, delta, n: need(a.n, "n")?, ambient: a.l }
        }
        Kind::Grid => GeneratorSpec::Grid { ell: need(a.l, "l")? },
        Kind::Planted => GeneratorSpec::RandomPlanted { n: need(a.n, "n")?, k: a.k, ell: need(a.l, "l")?, triples: a.triples },
        Kind::ComplexPlanted => {
            let p = generate_complex_planted::<f64>(need(a.n, "n")?, a.k, need(a.l, "l")?, a.triples, g.seed, tol)?;
            return Ok(write_complex_arrangement(p.ambient, &p.spaces));
        }
    };
    Ok(write_arrangement(&generate(&spec, g.seed, tol)?))
}

fn triples(input: &Path, k: Option<usize>, tol: &Tolerance<f64>) -> Result<String, Failure> {
    let arr = read_real(input, tol)?;
    let k = k.unwrap_or_else(|| arr.max_dim());
    let mut out = String::new();
    for [a, b, c] in dependent_triples(&arr, tol) {
        let _ = writeln!(out, "triple {a} {b} {c}");
    }
    for sp in find_special_spaces(&arr, k, tol)? {
        let members: Vec<String> = sp.members.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "special size {} members {}", sp.size(), members.join(" "));
    }
    Ok(out)
}

fn system(input: &Path, k: Option<usize>, tol: &Tolerance<f64>) -> Result<String, Failure> {
    let arr = read_real(input, tol)?;
    let sys = build_sg_system(&arr, k.unwrap_or_else(|| arr.max_dim()), tol)?;
    Ok(write_system(&sys))
}

fn scale(a: &ScaleArgs, g: &Global, tol: &Tolerance<f64>) -> Result<String, Failure> {
    let arr = read_real(&a.input, tol)?;
    let sample = sample_admissible_with_workers(&arr, g.trials, g.seed, g.workers, tol)?;
    let hull = admissible_hull_vector(&sample);
    let opts = OptimizeOptions { eps: a.eps, max_iter: a.max_iter, t_cap: a.tcap, ..Default::default() };
    let (_, map, m, _) = barthe_scale(&arr, &hull, &opts, tol)?;
    if let Some(ob) = &map.obstruction {
        return Err(Failure::Invariant(format!("scaling obstructed: {ob:?}")));
    }
    let mut out = write_matrix(&m);
    let _ = writeln!(out, "gap {:.6e}", map.achieved_eps);
    Ok(out)
}

fn run_certify(a: &CertifyArgs, g: &Global, tol: &Tolerance<f64>) -> Result<String, Failure> {
    let arr = read_real(&a.input, tol)?;
    let sys = match &a.system {
        Some(p) => read_system(p)?,
        None => build_sg_system(&arr, arr.max_dim(), tol)?,
    };
    let opts = CertifyOptions {
        beta: a.beta,
        trials: g.trials,
        seed: g.seed,
        workers: g.workers,
        retries: a.retries,
        max_rounds: a.max_rounds,
        time_limit: a.time_limit.map(Duration::from_secs_f64),
        force: a.force.map(|f| match f {
            ForceArg::Sample => Branch::Sample,
            ForceArg::Scale => Branch::Scale,
        }),
        forced_rounds: if a.force.is_some() { a.forced_rounds } else { 0 },
    };
    let (_, trace) = certify(&arr, &sys, &opts, tol)?;
    Ok(trace.to_string())
}

fn reduce(input: &Path, tol: &Tolerance<f64>) -> Result<String, Failure> {
    let file = read_file(input)?;
    let ambient = file.ambient;
    let spaces = file.into_complex(tol)?;
    Ok(write_arrangement(&complex_to_real(ambient, &spaces, tol)?))
}

/// One `PASS`/`FAIL` line per clause; fails if any clause does.
fn verify(input: &Path, system: Option<&Path>, tol: &Tolerance<f64>) -> Result<String, Failure> {
    let file = read_file(input)?;
    let mut out = String::new();
    let mut failed = Vec::new();
    let mut check = |clause: &str, res: Result<String, String>| {
        match res {
            Ok(note) => writeln!(out, "PASS {clause}{}", if note.is_empty() { note } else { format!(": {note}") }),
            Err(msg) => {
                failed.push(clause.to_string());
                writeln!(out, "FAIL {clause}: {msg}")
            }
        }
        .ok();
    };
    let arr = if file.is_complex() {
        let ambient = file.ambient;
        match file.into_complex(tol) {
            Ok(spaces) => {
                check("complex independence", Ok(String::new()));
                match complex_to_real(ambient, &spaces, tol) {
                    Ok(real) => {
                        let (dc, dr) = (complex_dimension(ambient, &spaces, tol), real.dimension(tol));
                        let kmax = spaces.iter().map(|s| s.dim()).max().unwrap_or(0);
                        let ok = dc <= dr && real.spaces().iter().all(|s| s.dim() <= 2 * kmax);
                        check(
                            "realification",
                            if ok { Ok(format!("dim_C {dc} <= dim_R {dr}")) } else { Err(format!("dim_C {dc}, dim_R {dr}")) },
                        );
                        Some(real)
                    }
                    Err(e) => {
                        check("realification", Err(e.to_string()));
                        None
                    }
                }
            }
            Err(e) => {
                check("complex independence", Err(e.to_string()));
                None
            }
        }
    } else {
        match file.into_real(tol) {
            Ok(a) => {
                check("orthonormality", Ok(String::new()));
                Some(a)
            }
            Err(e) => {
                check("orthonormality", Err(e.to_string()));
                None
            }
        }
    };
    if let Some(arr) = &arr {
        let pairs = pairwise_zero_intersection(arr, tol);
        if let Some(p) = system {
            // only a precondition once a system is built on top
            check(
                "zero intersection",
                match pairs.first() {
                    None => Ok(String::new()),
                    Some((i, j)) => Err(format!("{} intersecting pairs, first ({i}, {j})", pairs.len())),
                },
            );
            let sys = read_system(p)?;
            let report = validate_system(arr, &sys, tol);
            check(
                "system",
                if report.is_valid() {
                    Ok(format!("alpha {} delta {}", sys.alpha(), format_rational(&sys.delta())))
                } else {
                    Err(report.to_string())
                },
            );
        } else if let Some((i, j)) = pairs.first() {
            let _ = writeln!(out, "INFO {} intersecting pairs, first ({i}, {j})", pairs.len());
        }
    }
    if failed.is_empty() {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Invariant(format!("failed: {}", failed.join(", "))))
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let g = &cli.global;
    let tol = Tolerance::new(g.rank_tol, g.residual_tol).map_err(|e| Failure::Usage(e.to_string()))?;
    if g.workers == Some(0) {
        return Err(Failure::Usage("--workers must be positive".into()));
    }
    let text = match &cli.command {
        Command::Gen(a) => gen(a, g, &tol)?,
        Command::Triples { input, k } => triples(input, *k, &tol)?,
        Command::System { input, k } => system(input, *k, &tol)?,
        Command::Scale(a) => scale(a, g, &tol)?,
        Command::Certify(a) => run_certify(a, g, &tol)?,
        Command::Reduce { input } => reduce(input, &tol)?,
        Command::Verify { input, system } => verify(input, system.as_deref(), &tol)?,
    };
    emit(&g.output, &text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Invariant(m) | Failure::Usage(m) | Failure::Budget(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}
