//! The `subspec` command-line tool.
//!
//! Exit codes: 0 success, 1 computational or verification failure, 2 usage
//! or configuration error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::ensembles::{
    half_ones_diagonal, load_matrix, random_general, random_symmetric, rw_covariance, write_matrix, EnsembleSpec,
    EntryDist,
};
use crate::format::{fmt17, num, to_json_string};
use crate::linalg::{DenseMatrix, Spectrum};
use crate::montecarlo::{
    compare_tail, default_reference, empirical_tail, estimate_supnorm, linspace, pointwise_tail_bound,
    quantile_sorted, solver_metadata, subset_spectrum, theorem1_mean_bound, Mode, ReferenceKind,
};
use crate::oracle::{chaining_check, exact_tail_curve, halfones_exact_f, ExactEnsemble};
use crate::sampling::{random_k_subset, SeedPlan};
use crate::spectra::{esd, ks_two_sample, StepCdf};
use crate::walk::{
    factorial, kernel_matrix, rank_step_check, transpositions, triple_norm_bound_with, unrank_perm, verify_kernel,
    verify_kernel_matrix, verify_ledoux_tail, SubsetSpectra,
};
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "subspec", version, about = "Spectral statistics of random submatrices")]
struct Cli {
    /// Worker threads; 0 uses every core. Never changes any output.
    #[arg(long, global = true, env = "SUBSPEC_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a matrix file.
    Gen(GenArgs),
    /// Monte Carlo estimate of F, of E||F_A - F||, and of its tail.
    Estimate(EstimateArgs),
    /// Two independent submatrices compared by a two-sample KS test.
    Fig1(Fig1Args),
    /// Run the inequality verification suite.
    Verify(VerifyArgs),
    /// Exact results by enumerating every subset.
    Oracle(OracleArgs),
    /// Two-sample KS test between the spectra of two matrix files.
    Ks(KsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EnsembleName {
    RwCovariance,
    HalfOnes,
    /// Random symmetric with entries drawn from --dist.
    Random,
    RandomGaussian,
    RandomPm1,
    /// Random rectangular Gaussian (not Hermitian).
    RandomGeneral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DistArg {
    Gaussian,
    Pm1,
}

impl From<DistArg> for EntryDist {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::Gaussian => EntryDist::Gaussian,
            DistArg::Pm1 => EntryDist::Pm1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Eigen,
    Singular,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Eigen => Mode::Eigen,
            ModeArg::Singular => Mode::Singular,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MatrixArgs {
    /// Matrix file to load.
    #[arg(long, conflicts_with = "ensemble")]
    matrix: Option<PathBuf>,
    /// Built-in matrix.
    #[arg(long, value_enum)]
    ensemble: Option<EnsembleName>,
    /// Order (rows) of the built-in matrix.
    #[arg(long)]
    n: Option<usize>,
    /// Columns for random-general (defaults to --n).
    #[arg(long)]
    cols: Option<usize>,
    /// Seed of random built-in matrices.
    #[arg(long, default_value_t = 0)]
    matrix_seed: u64,
    #[arg(long, value_enum, default_value = "gaussian")]
    dist: DistArg,
}

#[derive(Debug, Args)]
struct RGridArgs {
    #[arg(long, default_value_t = 0.0)]
    r_min: f64,
    #[arg(long, default_value_t = 5.0)]
    r_max: f64,
    #[arg(long, default_value_t = 50)]
    r_points: usize,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(value_enum)]
    ensemble: EnsembleName,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "gaussian")]
    dist: DistArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "eigen")]
    mode: ModeArg,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Master seed of the sampling run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    r_grid: RGridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct Fig1Args {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long, default_value_t = 20)]
    k: usize,
    #[arg(long, value_enum, default_value = "eigen")]
    mode: ModeArg,
    /// Largest values dropped from each sampled spectrum before comparing.
    #[arg(long, default_value_t = 4)]
    exclude_top: usize,
    #[arg(long, default_value_t = 500)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reuse the first stream for both members of each pair.
    #[arg(long)]
    identical: bool,
    /// Write the first pair's CDFs to PREFIX_a.csv and PREFIX_b.csv.
    #[arg(long)]
    cdf_prefix: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Largest symmetric-group order; the suite covers 3..=N.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(3..=6))]
    n: u64,
    /// Seed of the random test matrices.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Self-test: perturb one kernel entry, which must make the suite fail.
    #[arg(long)]
    corrupt_kernel: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleTable {
    F,
    Supnorm,
    Tail,
    Pointwise,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "eigen")]
    mode: ModeArg,
    #[command(flatten)]
    r_grid: RGridArgs,
    /// Point for the pointwise tail P(|F_A(x) - F(x)| >= r).
    #[arg(long, requires = "r")]
    x: Option<f64>,
    #[arg(long, requires = "x")]
    r: Option<f64>,
    /// Table written in CSV mode.
    #[arg(long, value_enum, default_value = "supnorm")]
    table: OracleTable,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct KsArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, value_enum, default_value = "eigen")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    exclude_top: usize,
    #[command(flatten)]
    output: OutputArgs,
}

/// Why a command stopped.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::EnumerationCap { .. }
            | Error::NotSquare { .. }
            | Error::NotHermitian { .. }
            | Error::DimensionMismatch(_)
            | Error::Parse { .. } => Failure::Usage(e.to_string()),
            Error::NoConvergence { .. } | Error::EmptySpectrum | Error::Verification(_) | Error::Io(_) => {
                Failure::Compute(e.to_string())
            }
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

type CmdResult<T> = std::result::Result<T, Failure>;

/// Text to emit and whether every check passed.
struct Outcome {
    text: String,
    passed: bool,
}

/// Parses `args` (including the program name) and runs the command;
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return 1;
        }
    };
    match pool.install(|| execute(&cli.command)) {
        Ok(outcome) => {
            if let Err(e) = emit(&outcome.text, output_path(&cli.command)) {
                eprintln!("error: {e}");
                return 1;
            }
            if outcome.passed {
                0
            } else {
                eprintln!("error: one or more checks failed");
                1
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn output_path(cmd: &Command) -> Option<&Path> {
    match cmd {
        Command::Gen(a) => a.out.as_deref(),
        Command::Estimate(a) => a.output.out.as_deref(),
        Command::Fig1(a) => a.output.out.as_deref(),
        Command::Verify(a) => a.output.out.as_deref(),
        Command::Oracle(a) => a.output.out.as_deref(),
        Command::Ks(a) => a.output.out.as_deref(),
    }
}

fn emit(text: &str, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn execute(cmd: &Command) -> CmdResult<Outcome> {
    match cmd {
        Command::Gen(a) => cmd_gen(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Fig1(a) => cmd_fig1(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Ks(a) => cmd_ks(a),
    }
}

fn ensemble_spec(name: EnsembleName, n: usize, cols: Option<usize>, seed: u64, dist: DistArg) -> EnsembleSpec {
    match name {
        EnsembleName::RwCovariance => EnsembleSpec::RwCovariance { n },
        EnsembleName::HalfOnes => EnsembleSpec::HalfOnes { n },
        EnsembleName::Random => EnsembleSpec::RandomSymmetric { n, seed, dist: dist.into() },
        EnsembleName::RandomGaussian => EnsembleSpec::RandomSymmetric { n, seed, dist: EntryDist::Gaussian },
        EnsembleName::RandomPm1 => EnsembleSpec::RandomSymmetric { n, seed, dist: EntryDist::Pm1 },
        EnsembleName::RandomGeneral => EnsembleSpec::RandomGeneral { rows: n, cols: cols.unwrap_or(n), seed },
    }
}

impl MatrixArgs {
    fn spec(&self, default: Option<(EnsembleName, usize)>) -> CmdResult<EnsembleSpec> {
        if let Some(path) = &self.matrix {
            return Ok(EnsembleSpec::File { path: path.clone() });
        }
        let (name, n) = match (self.ensemble, default) {
            (Some(name), _) => (name, self.n.ok_or_else(|| usage("--ensemble needs --n"))?),
            (None, Some((name, n))) => (name, self.n.unwrap_or(n)),
            (None, None) => return Err(usage("give a matrix with --matrix PATH or --ensemble NAME --n N")),
        };
        Ok(ensemble_spec(name, n, self.cols, self.matrix_seed, self.dist))
    }
}

fn build_matrix(spec: &EnsembleSpec) -> CmdResult<DenseMatrix> {
    spec.build().map_err(|e| match e {
        Error::Io(io) => usage(format!("cannot read matrix: {io}")),
        other => other.into(),
    })
}

impl RGridArgs {
    fn grid(&self) -> CmdResult<Vec<f64>> {
        let ok = self.r_min.is_finite() && self.r_max.is_finite() && self.r_min >= 0.0 && self.r_points >= 1;
        if !ok || (self.r_points > 1 && self.r_max <= self.r_min) {
            return Err(usage("r grid needs 0 <= r-min < r-max and r-points >= 1"));
        }
        Ok(linspace(self.r_min, self.r_max, self.r_points))
    }

    fn to_json(&self) -> Value {
        json!({ "min": num(self.r_min), "max": num(self.r_max), "points": self.r_points })
    }
}

fn metadata() -> Value {
    json!({
        "tool": concat!("subspec ", env!("CARGO_PKG_VERSION")),
        "solver": solver_metadata(),
    })
}

fn document(config: Value, mut body: Map<String, Value>) -> String {
    let mut doc = Map::new();
    doc.insert("config".into(), config);
    doc.insert("metadata".into(), metadata());
    doc.append(&mut body);
    to_json_string(&Value::Object(doc))
}

fn require_k(k: usize) -> CmdResult<()> {
    if k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    Ok(())
}

fn cmd_gen(a: &GenArgs) -> CmdResult<Outcome> {
    if a.n == 0 || a.cols == Some(0) {
        return Err(usage("--n and --cols must be positive"));
    }
    let m = build_matrix(&ensemble_spec(a.ensemble, a.n, a.cols, a.seed, a.dist))?;
    Ok(Outcome { text: write_matrix(&m), passed: true })
}

fn cmd_estimate(a: &EstimateArgs) -> CmdResult<Outcome> {
    let spec = a.matrix.spec(None)?;
    require_k(a.k)?;
    if a.samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let r_grid = a.r_grid.grid()?;
    let m = build_matrix(&spec)?;
    let mode: Mode = a.mode.into();

    let (reference, kind) = match (&spec, mode) {
        (EnsembleSpec::HalfOnes { n }, Mode::Eigen) if a.k <= *n => {
            (halfones_exact_f(*n, a.k)?, ReferenceKind::ClosedForm("half-ones hypergeometric"))
        }
        _ => default_reference(&m, a.k, mode, a.samples, a.seed)?,
    };
    let report = estimate_supnorm(&m, a.k, mode, a.samples, a.seed, &reference)?;
    let curve = empirical_tail(&report, &r_grid)?;
    let comparison = compare_tail(&curve);

    let text = match a.output.format {
        Format::Csv => curve.to_csv(),
        Format::Json => {
            let config = json!({
                "subcommand": "estimate",
                "matrix": spec.to_string(),
                "k": a.k,
                "mode": mode.as_str(),
                "n_samples": a.samples,
                "master_seed": a.seed,
                "r_grid": a.r_grid.to_json(),
                "format": a.output.format.as_str(),
            });
            let mut body = Map::new();
            body.insert("reference".into(), kind.to_json());
            body.insert("report".into(), report.to_json());
            body.insert("tail".into(), curve.to_json());
            body.insert("comparison".into(), comparison.to_json());
            document(config, body)
        }
    };
    Ok(Outcome { text, passed: true })
}

struct PairResult {
    subset_a: Vec<usize>,
    subset_b: Vec<usize>,
    f_a: StepCdf,
    f_b: StepCdf,
    statistic: f64,
    lambda: f64,
    p_value: f64,
}

fn cmd_fig1(a: &Fig1Args) -> CmdResult<Outcome> {
    let spec = a.matrix.spec(Some((EnsembleName::RwCovariance, 100)))?;
    require_k(a.k)?;
    if a.exclude_top >= a.k {
        return Err(usage(format!("--exclude-top {} must be smaller than --k {}", a.exclude_top, a.k)));
    }
    if a.pairs == 0 {
        return Err(usage("--pairs must be at least 1"));
    }
    let m = build_matrix(&spec)?;
    let mode: Mode = a.mode.into();
    let n = crate::montecarlo::validate_input(&m, a.k, mode)?;
    let kept = a.k - a.exclude_top;
    let plan = SeedPlan::new(a.seed);

    let draw = |stream: u64| -> crate::Result<(Vec<usize>, StepCdf)> {
        let mut rng = plan.stream(stream);
        let subset = random_k_subset(n, a.k, &mut rng)?;
        let spectrum: Spectrum = subset_spectrum(&m, &subset, mode)?.without_top(a.exclude_top)?;
        Ok((subset.one_based(), esd(&spectrum)))
    };
    let results: Vec<PairResult> = (0..a.pairs as u64)
        .into_par_iter()
        .map(|p| {
            let (subset_a, f_a) = draw(2 * p)?;
            let (subset_b, f_b) = if a.identical { (subset_a.clone(), f_a.clone()) } else { draw(2 * p + 1)? };
            let ks = ks_two_sample(&f_a, kept, &f_b, kept)?;
            Ok(PairResult { subset_a, subset_b, f_a, f_b, statistic: ks.statistic, lambda: ks.lambda, p_value: ks.p_value })
        })
        .collect::<crate::Result<_>>()?;

    if let Some(prefix) = &a.cdf_prefix {
        let first = &results[0];
        for (suffix, f) in [("a", &first.f_a), ("b", &first.f_b)] {
            let mut name = prefix.as_os_str().to_owned();
            name.push(format!("_{suffix}.csv"));
            fs::write(PathBuf::from(name), f.to_csv()).map_err(|e| Failure::Compute(e.to_string()))?;
        }
    }

    let mut stats: Vec<f64> = results.iter().map(|r| r.statistic).collect();
    stats.sort_by(f64::total_cmp);
    let mut pvals: Vec<f64> = results.iter().map(|r| r.p_value).collect();
    pvals.sort_by(f64::total_cmp);
    let share_p = results.iter().filter(|r| r.p_value >= 0.05).count() as f64 / results.len() as f64;

    let text = match a.output.format {
        Format::Csv => {
            let mut out = String::from("pair,statistic,lambda,p_value\n");
            for (i, r) in results.iter().enumerate() {
                out.push_str(&format!("{i},{},{},{}\n", fmt17(r.statistic), fmt17(r.lambda), fmt17(r.p_value)));
            }
            out
        }
        Format::Json => {
            let config = json!({
                "subcommand": "fig1",
                "matrix": spec.to_string(),
                "k": a.k,
                "mode": mode.as_str(),
                "exclude_top": a.exclude_top,
                "pairs": a.pairs,
                "master_seed": a.seed,
                "identical": a.identical,
                "format": a.output.format.as_str(),
            });
            let pairs: Vec<Value> = results
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    json!({
                        "pair": i,
                        "subset_a": r.subset_a,
                        "subset_b": r.subset_b,
                        "statistic": num(r.statistic),
                        "lambda": num(r.lambda),
                        "p_value": num(r.p_value),
                    })
                })
                .collect();
            let mut body = Map::new();
            body.insert(
                "protocol".into(),
                json!({
                    "streams": "pair p uses streams 2p (A) and 2p+1 (B)",
                    "renormalization": "top values dropped, ESD renormalized over the remaining k - exclude_top",
                    "ks_sample_size": kept,
                    "p_value": "asymptotic Kolmogorov distribution",
                }),
            );
            body.insert("pairs".into(), Value::Array(pairs));
            body.insert(
                "summary".into(),
                json!({
                    "statistic_quantiles": {
                        "0.1": num(quantile_sorted(&stats, 0.1)),
                        "0.5": num(quantile_sorted(&stats, 0.5)),
                        "0.9": num(quantile_sorted(&stats, 0.9)),
                    },
                    "median_statistic": num(quantile_sorted(&stats, 0.5)),
                    "median_p_value": num(quantile_sorted(&pvals, 0.5)),
                    "share_p_at_least_0.05": num(share_p),
                }),
            );
            document(config, body)
        }
    };
    Ok(Outcome { text, passed: true })
}

/// One line of the verification report.
struct Check {
    name: String,
    passed: bool,
    measured: f64,
    required: f64,
    detail: String,
}

impl Check {
    fn new(name: impl Into<String>, measured: f64, required: f64, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, measured, required, detail: detail.into() }
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "passed": self.passed,
            "measured": num(self.measured),
            "required": num(self.required),
            "detail": self.detail,
        })
    }
}

fn verify_matrices(n: usize, seed: u64) -> Vec<(String, DenseMatrix)> {
    let mut out = vec![
        (format!("rw-covariance({n})"), rw_covariance(n)),
        (format!("half-ones({n})"), half_ones_diagonal(n)),
    ];
    for s in 0..5 {
        out.push((format!("random({n}, seed={})", seed + s), random_symmetric(n, seed + s, EntryDist::Gaussian)));
    }
    out
}

/// 20-point grid covering every value in `values` with a margin.
fn x_grid(values: &[f64], points: usize) -> Vec<f64> {
    let (lo, hi) = (values[0], values[values.len() - 1]);
    let pad = 0.05 * (hi - lo) + 1e-3;
    linspace(lo - pad, hi + pad, points)
}

fn walk_checks(n: usize, seed: u64, corrupt: bool, checks: &mut Vec<Check>) -> CmdResult<()> {
    let gap_tol = if n >= 6 { 1e-7 } else { 1e-8 };
    let report = if corrupt {
        let mut bad = kernel_matrix(n)?;
        bad.set(0, 1, bad.get(0, 1) + 0.25, 0.0);
        verify_kernel_matrix(n, &bad, true)?
    } else {
        verify_kernel(n)?
    };
    let kernel_err = report.row_sum_error.max(report.reversibility_error).max(report.invariance_error);
    checks.push(Check::new(
        format!("kernel n={n}"),
        kernel_err,
        1e-14,
        kernel_err <= 1e-14,
        "max of row-sum, reversibility, invariance errors",
    ));
    let gap_err = (report.gap - report.gap_theory).abs();
    checks.push(Check::new(
        format!("spectral gap n={n}"),
        gap_err,
        gap_tol,
        gap_err <= gap_tol,
        format!("gap {} vs 2/n = {}", fmt17(report.gap), fmt17(report.gap_theory)),
    ));

    let ledoux_grid = linspace(0.0, 5.0, 26);
    for (label, m) in verify_matrices(n, seed) {
        for k in 2..n {
            let cache = SubsetSpectra::build(&m, k, Mode::Eigen)?;
            let grid = x_grid(&cache.all_values(), 20);
            let name = format!("triple norm {label} k={k}");
            match triple_norm_bound_with(&cache, &grid) {
                Ok(worst) => checks.push(Check::new(name, worst, 4.0, true, "max kn|||f|||^2 over the x grid")),
                Err(Error::Verification(msg)) => checks.push(Check::new(name, f64::NAN, 4.0, false, msg)),
                Err(e) => return Err(e.into()),
            }

            let mut worst_excess = f64::NEG_INFINITY;
            let mut witness = String::new();
            for &x in &grid {
                let f = cache.observable(x);
                for (sign, g) in [("+", f.clone()), ("-", f.scaled(-1.0))] {
                    let rep = verify_ledoux_tail(&g, &ledoux_grid)?;
                    for p in &rep.points {
                        if p.measure - p.bound > worst_excess {
                            worst_excess = p.measure - p.bound;
                            witness = format!("x={} sign={sign} r={}", fmt17(x), fmt17(p.r));
                        }
                    }
                }
            }
            checks.push(Check::new(
                format!("ledoux tail {label} k={k}"),
                worst_excess,
                0.0,
                worst_excess <= 0.0,
                format!("max of measure - bound; attained at {witness}"),
            ));
        }
    }

    // every sigma and tau for two matrices at k = floor(n/2)
    let k = (n / 2).max(1);
    for (label, m) in verify_matrices(n, seed).into_iter().step_by(2).take(2) {
        let mut max_rank = 0;
        let mut max_gap: f64 = 0.0;
        let mut outside_ok = true;
        for r in 0..factorial(n) {
            let sigma = unrank_perm(n, r)?;
            for tau in transpositions(n) {
                let step = rank_step_check(&m, k, &sigma, tau, Mode::Eigen)?;
                max_rank = max_rank.max(step.rank_diff);
                max_gap = max_gap.max(step.f_gap_max);
                if tau.0 >= k && tau.1 >= k && !(step.identical && step.rank_diff == 0 && step.f_gap_max == 0.0) {
                    outside_ok = false;
                }
            }
        }
        checks.push(Check::new(
            format!("rank step {label} k={k}"),
            max_rank as f64,
            2.0,
            max_rank <= 2 && outside_ok,
            "max rank(A(sigma) - A(sigma tau)); swaps outside 1..k leave A unchanged",
        ));
        let required = 2.0 / k as f64 + 1e-12;
        checks.push(Check::new(
            format!("step distance {label} k={k}"),
            max_gap,
            required,
            max_gap <= required,
            "max sup|F_A(sigma) - F_A(sigma tau)| vs 2/k",
        ));
    }
    Ok(())
}

fn oracle_checks(seed: u64, checks: &mut Vec<Check>) -> CmdResult<()> {
    let r_grid = linspace(0.0, 5.0, 50);
    let instances = vec![
        ("rw-covariance(8)".to_string(), rw_covariance(8), Mode::Eigen),
        ("half-ones(8)".to_string(), half_ones_diagonal(8), Mode::Eigen),
        (format!("random(8, seed={seed})"), random_symmetric(8, seed, EntryDist::Gaussian), Mode::Eigen),
        (format!("random-general(8x8, seed={seed})"), random_general(8, 8, seed), Mode::Singular),
    ];
    for (label, m, mode) in instances {
        for k in 1..=4 {
            let ens = ExactEnsemble::build(&m, k, mode)?;
            let f = ens.reference();
            let dist = ens.supnorm_distribution(&f);
            let curve = exact_tail_curve(&dist, k, &r_grid, ens.subset_count())?;
            let excess = curve.empirical.iter().zip(&curve.bound).map(|(e, b)| e - b).fold(f64::NEG_INFINITY, f64::max);
            checks.push(Check::new(
                format!("exact tail {label} k={k}"),
                excess,
                0.0,
                excess <= 0.0,
                "max over r of exact tail - 12 sqrt(k) exp(-r sqrt(k/8))",
            ));
            let mean_bound = theorem1_mean_bound(k);
            checks.push(Check::new(
                format!("exact mean {label} k={k}"),
                dist.mean(),
                mean_bound,
                dist.mean() <= mean_bound,
                "E||F_A - F|| vs (13 + sqrt(8) ln k)/sqrt(k)",
            ));

            let xs = x_grid(f.jumps(), 20);
            let mut pointwise_excess = f64::NEG_INFINITY;
            for &x in &xs {
                for &r in &r_grid[1..] {
                    pointwise_excess = pointwise_excess.max(ens.pointwise_tail(&f, x, r) - pointwise_tail_bound(k, r));
                }
            }
            checks.push(Check::new(
                format!("pointwise tail {label} k={k}"),
                pointwise_excess,
                0.0,
                pointwise_excess <= 0.0,
                "max over (x, r) of P(|F_A(x) - F(x)| >= r) - 6 exp(-r sqrt(k)/sqrt(8))",
            ));

            let l_sqrt = (k as f64).sqrt().floor() as usize + 1;
            let mut chaining_ok = true;
            let mut worst_slack = f64::NEG_INFINITY;
            for i in 0..ens.subset_count() {
                let g = esd(&Spectrum::new(ens.spectrum(i).to_vec())?);
                for l in [2, l_sqrt.max(2), 5, 10, 40] {
                    let c = chaining_check(&f, &g, l)?;
                    chaining_ok &= c.holds;
                    worst_slack = worst_slack.max(c.distance - c.bound);
                }
            }
            checks.push(Check::new(
                format!("chaining {label} k={k}"),
                worst_slack,
                1e-12,
                chaining_ok,
                "max of ||F_A - F|| - (1/l + delta)",
            ));
        }
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult<Outcome> {
    let max_n = a.n as usize;
    let mut checks = Vec::new();
    for n in 3..=max_n {
        walk_checks(n, a.seed, a.corrupt_kernel, &mut checks)?;
    }
    oracle_checks(a.seed, &mut checks)?;
    let passed = checks.iter().all(|c| c.passed);

    let text = match a.output.format {
        Format::Csv => {
            let mut out = String::from("check,passed,measured,required\n");
            for c in &checks {
                out.push_str(&format!("{},{},{},{}\n", c.name.replace(',', ";"), c.passed, fmt17(c.measured), fmt17(c.required)));
            }
            out
        }
        Format::Json => {
            let config = json!({
                "subcommand": "verify",
                "n_max": max_n,
                "matrix_seed": a.seed,
                "corrupt_kernel": a.corrupt_kernel,
                "format": a.output.format.as_str(),
            });
            let failures: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            let mut body = Map::new();
            body.insert("passed".into(), json!(passed));
            body.insert("failures".into(), json!(failures));
            body.insert("checks".into(), Value::Array(checks.iter().map(Check::to_json).collect()));
            document(config, body)
        }
    };
    Ok(Outcome { text, passed })
}

fn cmd_oracle(a: &OracleArgs) -> CmdResult<Outcome> {
    let spec = a.matrix.spec(None)?;
    require_k(a.k)?;
    let r_grid = a.r_grid.grid()?;
    if a.table == OracleTable::Pointwise && a.x.is_none() {
        return Err(usage("--table pointwise needs --x and --r"));
    }
    let m = build_matrix(&spec)?;
    let mode: Mode = a.mode.into();

    let ens = ExactEnsemble::build(&m, a.k, mode)?;
    let f = ens.reference();
    let dist = ens.supnorm_distribution(&f);
    let curve = exact_tail_curve(&dist, a.k, &r_grid, ens.subset_count())?;
    let comparison = compare_tail(&curve);
    let pointwise = a.x.zip(a.r).map(|(x, r)| (x, r, ens.pointwise_tail(&f, x, r), pointwise_tail_bound(a.k, r)));

    let text = match (a.output.format, a.table) {
        (Format::Csv, OracleTable::F) => f.to_csv(),
        (Format::Csv, OracleTable::Supnorm) => dist.to_csv(),
        (Format::Csv, OracleTable::Tail) => curve.to_csv(),
        (Format::Csv, OracleTable::Pointwise) => {
            let (x, r, p, b) = pointwise.expect("checked above");
            format!("x,r,probability,bound\n{},{},{},{}\n", fmt17(x), fmt17(r), fmt17(p), fmt17(b))
        }
        (Format::Json, _) => {
            let config = json!({
                "subcommand": "oracle",
                "matrix": spec.to_string(),
                "k": a.k,
                "mode": mode.as_str(),
                "r_grid": a.r_grid.to_json(),
                "x": a.x.map(num),
                "r": a.r.map(num),
                "format": a.output.format.as_str(),
            });
            let mut body = Map::new();
            body.insert("subsets".into(), json!(ens.subset_count()));
            body.insert("F".into(), f.to_json());
            body.insert("supnorm_distribution".into(), dist.to_json());
            body.insert("mean_supnorm".into(), num(dist.mean()));
            body.insert("mean_bound".into(), num(theorem1_mean_bound(a.k)));
            body.insert("tail".into(), curve.to_json());
            body.insert("comparison".into(), comparison.to_json());
            if let Some((x, r, p, b)) = pointwise {
                body.insert("pointwise".into(), json!({ "x": num(x), "r": num(r), "probability": num(p), "bound": num(b) }));
            }
            document(config, body)
        }
    };
    Ok(Outcome { text, passed: true })
}

fn cmd_ks(a: &KsArgs) -> CmdResult<Outcome> {
    let mode: Mode = a.mode.into();
    let load = |p: &Path| -> CmdResult<(usize, StepCdf)> {
        let m = load_matrix(p).map_err(|e| match e {
            Error::Io(io) => usage(format!("cannot read {}: {io}", p.display())),
            other => other.into(),
        })?;
        let spectrum = match mode {
            Mode::Eigen => crate::linalg::eigenvalues_hermitian(&m)?,
            Mode::Singular => crate::linalg::singular_values(&m)?,
        };
        if a.exclude_top >= spectrum.count() {
            return Err(usage(format!("--exclude-top {} leaves no values of {}", a.exclude_top, p.display())));
        }
        let kept = spectrum.without_top(a.exclude_top)?;
        Ok((kept.count(), esd(&kept)))
    };
    let (na, fa) = load(&a.a)?;
    let (nb, fb) = load(&a.b)?;
    let result = ks_two_sample(&fa, na, &fb, nb)?;
    let text = match a.output.format {
        Format::Csv => format!(
            "statistic,lambda,p_value\n{},{},{}\n",
            fmt17(result.statistic),
            fmt17(result.lambda),
            fmt17(result.p_value)
        ),
        Format::Json => {
            let config = json!({
                "subcommand": "ks",
                "a": a.a.display().to_string(),
                "b": a.b.display().to_string(),
                "mode": mode.as_str(),
                "exclude_top": a.exclude_top,
                "format": a.output.format.as_str(),
            });
            let mut body = Map::new();
            body.insert("sample_sizes".into(), json!([na, nb]));
            body.insert("result".into(), result.to_json());
            document(config, body)
        }
    };
    Ok(Outcome { text, passed: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["subspec", "estimate", "--k", "2"]), 2);
        assert_eq!(run(["subspec", "fig1", "--k", "4", "--exclude-top", "4", "--pairs", "1"]), 2);
        assert_eq!(run(["subspec", "oracle", "--ensemble", "rw-covariance", "--n", "40", "--k", "20"]), 2);
        assert_eq!(run(["subspec", "bogus"]), 2);
        assert_eq!(run(["subspec", "verify", "--n", "9"]), 2);
    }

    #[test]
    fn failure_mapping() {
        assert!(matches!(Failure::from(Error::EnumerationCap { count: 3, cap: 2 }), Failure::Usage(_)));
        assert!(matches!(Failure::from(Error::NoConvergence { sweeps: 100 }), Failure::Compute(_)));
        assert!(matches!(Failure::from(Error::Verification("x".into())), Failure::Compute(_)));
    }
}
