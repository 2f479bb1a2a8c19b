//! Command-line front end for `focuspoly`.
//!
//! Every subcommand reads JSON and writes a JSON document of the form
//! `{"schema": 1, "manifest": {...}, "result": {...}}` to stdout (or to
//! `--output`). The manifest echoes the parsed configuration and seed, which
//! is enough to rerun a randomized command bit for bit. `haf`, `per` and
//! `vpartition` print the bare value unless `--report` is given.
//!
//! Exit codes: 0 success, 2 validation error, 3 cap exceeded or method
//! inapplicable, 64 unknown command.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use focuspoly::estimator::{DEFAULT_GAMMA, DEFAULT_TRIALS};
use focuspoly::gaussian::{needle_sphere_integral, sphere_from_gaussian};
use focuspoly::io::{parse_matrix, parse_pair, parse_partition, parse_polynomial, parse_sym_matrix, SCHEMA_VERSION};
use focuspoly::rng::GaussianStream;
use focuspoly::scalar::Accumulator;
use focuspoly::{
    approx_hafnian, estimate_gaussian_integral, estimate_sphere_integral, hafnian, integrate_gaussian,
    max_via_norms, maximize_on_sphere, pairing_exact_monomial, pairing_exact_permanent, pairing_randomized,
    permanent, sample_subspace, vector_partition_demo, vector_partition_enumerate, EstimatorConfig,
    FocusedPolynomial64, HafnianInstance, MonomialPolynomial, OptConfig, RngSeed, ShiftPolicy, Subspace,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INAPPLICABLE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "FOCUSPOLY_THREADS";

/// Stream used for the plain Monte Carlo baseline, clear of trial and
/// restart streams.
const MONTE_CARLO_STREAM: u64 = 1 << 40;

#[derive(Parser, Debug)]
#[command(name = "focuspoly", version, about = "Integrate and maximize focused polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
enum Command {
    /// Gaussian or sphere integral of a focused polynomial.
    Integrate(IntegrateArgs),
    /// Maximum on the unit sphere via a random subspace.
    Maximize(MaximizeArgs),
    /// Exact hafnian of a symmetric matrix; prints the value.
    Haf(ValueArgs),
    /// Exact permanent of a square matrix; prints the value.
    Per(ValueArgs),
    /// Hafnian of a matrix with positive off-diagonal entries.
    Hafnian(HafnianArgs),
    /// Complex Gaussian scalar product of a focused pair.
    Pair(PairArgs),
    /// Vector partition count through the scalar product; prints the count.
    Vpartition(PartitionArgs),
    /// Frame of a Haar-random subspace.
    SampleSubspace(SampleArgs),
    /// Needle benchmark: plain Monte Carlo against the subspace estimator.
    Benchmark(BenchmarkArgs),
}

#[derive(Args, Debug, Serialize)]
struct IoArgs {
    /// Input JSON file; standard input when absent or `-`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<PathBuf>,
    /// Write the document here instead of standard output.
    #[arg(long)]
    #[serde(skip)]
    output: Option<PathBuf>,
    /// Record the wall-clock duration in the manifest.
    #[arg(long)]
    #[serde(skip)]
    timing: bool,
}

#[derive(Args, Debug, Serialize)]
struct SamplingArgs {
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    gamma: f64,
    /// Odd number of trials for the median.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    /// Subspace dimension, overriding the bound.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl SamplingArgs {
    fn config(&self) -> Result<EstimatorConfig, CliError> {
        let seed = self.seed.ok_or_else(|| CliError::Validation("--seed is required for randomized commands".into()))?;
        let mut cfg = EstimatorConfig::new(self.eps, seed).with_gamma(self.gamma).with_trials(self.trials);
        cfg.k_override = self.k;
        Ok(cfg)
    }
}

#[derive(Args, Debug, Serialize)]
#[group(required = true, multiple = false)]
struct ExactOrRandomized {
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    randomized: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum Measure {
    Gaussian,
    Sphere,
}

#[derive(Args, Debug, Serialize)]
struct IntegrateArgs {
    #[command(flatten)]
    mode: ExactOrRandomized,
    #[arg(long, value_enum, default_value_t = Measure::Gaussian)]
    measure: Measure,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args, Debug, Serialize)]
struct MaximizeArgs {
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    gamma: f64,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    /// Also report the scaled L^{2p} norm of the restriction for this p.
    #[arg(long)]
    norm_power: Option<usize>,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args, Debug, Serialize)]
struct ValueArgs {
    /// Emit the full JSON document instead of the bare value.
    #[arg(long)]
    report: bool,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
#[allow(clippy::enum_variant_names)]
enum Shift {
    PsdAsGiven,
    MinEigenvalueShift,
    Explicit,
}

#[derive(Args, Debug, Serialize)]
#[group(required = true, multiple = false)]
struct ExactOrApprox {
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    approx: bool,
}

#[derive(Args, Debug, Serialize)]
struct HafnianArgs {
    #[command(flatten)]
    mode: ExactOrApprox,
    #[arg(long, value_enum, default_value_t = Shift::MinEigenvalueShift)]
    shift: Shift,
    /// Diagonal value for `--shift explicit`.
    #[arg(long)]
    lambda: Option<f64>,
    /// Include the exact hafnian alongside the estimate.
    #[arg(long)]
    with_exact: bool,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum PairMethod {
    Permanent,
    Monomial,
}

#[derive(Args, Debug, Serialize)]
struct PairArgs {
    #[command(flatten)]
    mode: ExactOrRandomized,
    #[arg(long, value_enum, default_value_t = PairMethod::Permanent)]
    method: PairMethod,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args, Debug, Serialize)]
struct PartitionArgs {
    /// Cross-check against direct enumeration.
    #[arg(long)]
    check: bool,
    #[arg(long)]
    report: bool,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args, Debug, Serialize)]
struct BenchmarkArgs {
    #[arg(long)]
    n: usize,
    /// The integrand is ξ1^(2 k_power).
    #[arg(long)]
    k_power: usize,
    #[arg(long, default_value_t = 100_000)]
    mc_samples: usize,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Inapplicable(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Inapplicable(_) => EXIT_INAPPLICABLE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Inapplicable(m) => m,
        }
    }
}

impl From<focuspoly::Error> for CliError {
    fn from(e: focuspoly::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Inapplicable(e.to_string())
        }
    }
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    config: Value,
    seed: Option<u64>,
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    duration_seconds: Option<f64>,
}

/// What a subcommand produced.
enum Output {
    /// Full document with this result body.
    Document { seed: Option<u64>, result: Value },
    /// Bare JSON value on one line.
    Bare(String),
}

/// Row of the needle benchmark: `∫_{S^{n-1}} ξ1^{2k}` three ways.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeedleTable {
    pub n: usize,
    pub k_power: usize,
    pub exact: f64,
    pub monte_carlo: f64,
    pub monte_carlo_rel_error: f64,
    pub mc_samples: usize,
    pub subspace: f64,
    pub subspace_rel_error: f64,
    pub k_used: usize,
    pub k_clamped: bool,
}

/// Compares the closed form, plain Monte Carlo with `mc_samples` uniform
/// sphere points, and the subspace estimator on `f = ξ1^{2 k_power}`.
pub fn cmd_benchmark_needle(n: usize, k_power: usize, mc_samples: usize, cfg: &EstimatorConfig) -> focuspoly::Result<NeedleTable> {
    use focuspoly::Error;
    if n == 0 {
        return Err(Error::InvalidConfig("n must be positive".into()));
    }
    if mc_samples == 0 {
        return Err(Error::InvalidConfig("mc_samples must be positive".into()));
    }
    cfg.validate()?;
    if k_power == 0 {
        return Ok(NeedleTable {
            n,
            k_power,
            exact: 1.0,
            monte_carlo: 1.0,
            monte_carlo_rel_error: 0.0,
            mc_samples,
            subspace: 1.0,
            subspace_rel_error: 0.0,
            k_used: cfg.k_override.unwrap_or(n),
            k_clamped: false,
        });
    }
    let degree = 2 * k_power;
    if degree > cfg.hafnian_cap {
        return Err(Error::OrderCapExceeded { order: degree, cap: cfg.hafnian_cap });
    }
    let exact = needle_sphere_integral(n, k_power);

    let mut stream = GaussianStream::new(RngSeed::new(cfg.seed, MONTE_CARLO_STREAM));
    let mut acc = Accumulator::new();
    for _ in 0..mc_samples {
        let first = stream.normal();
        let mut sq = first * first;
        for _ in 1..n {
            let z = stream.normal();
            sq += z * z;
        }
        acc.add((first * first / sq).powi(k_power as i32));
    }
    let monte_carlo = acc.value() / mc_samples as f64;

    let poly = FocusedPolynomial64::coordinate_power(n, 0, degree)?;
    let report = estimate_sphere_integral(&poly, cfg)?;
    let rel = |v: f64| (v - exact).abs() / exact;
    Ok(NeedleTable {
        n,
        k_power,
        exact,
        monte_carlo,
        monte_carlo_rel_error: rel(monte_carlo),
        mc_samples,
        subspace: report.estimate,
        subspace_rel_error: rel(report.estimate),
        k_used: report.k_used,
        k_clamped: report.k_clamped,
    })
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code. Documents go to `out`, diagnostics to `err`.
pub fn cmd_dispatch<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => return clap_failure(e, out, err),
    };
    let pool = match thread_pool() {
        Ok(pool) => pool,
        Err(e) => return report_error(&e, err),
    };
    let started = Instant::now();
    let name = command_name(&cli.command);
    let outcome = pool.install(|| run(&cli.command));
    let elapsed = started.elapsed().as_secs_f64();
    let _ = writeln!(err, "{name}: {elapsed:.3}s");
    match outcome {
        Ok(Output::Bare(text)) => emit(&text, io_args(&cli.command), out, err),
        Ok(Output::Document { seed, result }) => {
            let io = io_args(&cli.command);
            let manifest = RunManifest {
                command: name,
                config: serde_json::to_value(&cli.command).unwrap_or(Value::Null),
                seed,
                version: env!("CARGO_PKG_VERSION"),
                duration_seconds: io.timing.then_some(elapsed),
            };
            let doc = json!({ "schema": SCHEMA_VERSION, "manifest": manifest, "result": result });
            let text = serde_json::to_string_pretty(&doc).expect("documents serialize");
            emit(&text, io, out, err)
        }
        Err(e) => report_error(&e, err),
    }
}

fn clap_failure(e: clap::Error, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    use clap::error::ErrorKind;
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            let _ = write!(out, "{}", e.render());
            EXIT_OK
        }
        ErrorKind::InvalidSubcommand
        | ErrorKind::MissingSubcommand
        | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = write!(err, "{}", e.render());
            EXIT_USAGE
        }
        _ => {
            let _ = write!(err, "{}", e.render());
            EXIT_VALIDATION
        }
    }
}

fn report_error(e: &CliError, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "error: {}", e.message());
    e.code()
}

fn emit(text: &str, io: &IoArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let written = match &io.output {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => writeln!(out, "{text}").map_err(|e| format!("cannot write output: {e}")),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(m) => report_error(&CliError::Validation(m), err),
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let threads: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| CliError::Validation(format!("{THREADS_ENV}={raw:?} is not a positive integer")))?;
        builder = builder.num_threads(threads);
    }
    builder.build().map_err(|e| CliError::Inapplicable(format!("cannot start worker threads: {e}")))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Integrate(_) => "integrate",
        Command::Maximize(_) => "maximize",
        Command::Haf(_) => "haf",
        Command::Per(_) => "per",
        Command::Hafnian(_) => "hafnian",
        Command::Pair(_) => "pair",
        Command::Vpartition(_) => "vpartition",
        Command::SampleSubspace(_) => "sample-subspace",
        Command::Benchmark(_) => "benchmark",
    }
}

fn io_args(c: &Command) -> &IoArgs {
    match c {
        Command::Integrate(a) => &a.io,
        Command::Maximize(a) => &a.io,
        Command::Haf(a) | Command::Per(a) => &a.io,
        Command::Hafnian(a) => &a.io,
        Command::Pair(a) => &a.io,
        Command::Vpartition(a) => &a.io,
        Command::SampleSubspace(a) => &a.io,
        Command::Benchmark(a) => &a.io,
    }
}

fn read_input(io: &IoArgs) -> Result<String, CliError> {
    match io.input.as_deref() {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display()))),
        _ => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| CliError::Validation(format!("cannot read standard input: {e}")))?;
            Ok(text)
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Integers print without a fractional part; everything else uses the
/// shortest round-trip representation.
fn format_number(v: f64) -> String {
    if v.is_finite() && v.fract() == 0.0 && v.abs() < 9_007_199_254_740_992.0 {
        format!("{}", v as i64)
    } else {
        serde_json::to_string(&v).expect("numbers serialize")
    }
}

fn run(command: &Command) -> Result<Output, CliError> {
    match command {
        Command::Integrate(a) => run_integrate(a),
        Command::Maximize(a) => run_maximize(a),
        Command::Haf(a) => {
            let c = parse_sym_matrix::<f64>(&read_input(&a.io)?)?;
            let value = hafnian(&c)?;
            bare_or_document(a.report, value, json!({ "order": c.order(), "value": value }))
        }
        Command::Per(a) => {
            let c = parse_matrix::<f64>(&read_input(&a.io)?)?;
            let value = permanent(&c)?;
            bare_or_document(a.report, value, json!({ "order": c.order(), "value": value }))
        }
        Command::Hafnian(a) => run_hafnian(a),
        Command::Pair(a) => run_pair(a),
        Command::Vpartition(a) => {
            let inst = parse_partition(&read_input(&a.io)?)?;
            let count = vector_partition_demo(&inst)?;
            let mut result = json!({ "count": count });
            if a.check {
                let direct = vector_partition_enumerate(&inst)?;
                if direct != count {
                    return Err(CliError::Inapplicable(format!("scalar-product count {count} differs from enumeration {direct}")));
                }
                result["enumerated"] = json!(direct);
            }
            if a.report {
                Ok(Output::Document { seed: None, result })
            } else {
                Ok(Output::Bare(count.to_string()))
            }
        }
        Command::SampleSubspace(a) => {
            let l: Subspace<f64> = sample_subspace(a.n, a.k, RngSeed::new(a.seed, a.stream))?;
            let result = json!({ "n": a.n, "k": a.k, "seed": a.seed, "stream": a.stream, "frame": l.rows() });
            Ok(Output::Document { seed: Some(a.seed), result })
        }
        Command::Benchmark(a) => {
            let cfg = a.sampling.config()?;
            let table = cmd_benchmark_needle(a.n, a.k_power, a.mc_samples, &cfg)?;
            Ok(Output::Document { seed: Some(cfg.seed), result: to_value(&table) })
        }
    }
}

fn bare_or_document(report: bool, value: f64, result: Value) -> Result<Output, CliError> {
    if report {
        Ok(Output::Document { seed: None, result })
    } else {
        Ok(Output::Bare(format_number(value)))
    }
}

fn run_integrate(a: &IntegrateArgs) -> Result<Output, CliError> {
    let poly = parse_polynomial::<f64>(&read_input(&a.io)?)?;
    let (n, m) = (poly.dimension(), poly.degree());
    if a.mode.exact {
        let gaussian = integrate_gaussian(&poly)?;
        let value = match a.measure {
            Measure::Gaussian => gaussian,
            Measure::Sphere if m % 2 == 1 => 0.0,
            Measure::Sphere => sphere_from_gaussian(gaussian, n, m)?,
        };
        let delta = poly.certificate().ok().map(|c| c.delta);
        let result = json!({ "measure": a.measure, "value": value, "n": n, "m": m, "delta": delta });
        return Ok(Output::Document { seed: None, result });
    }
    let cfg = a.sampling.config()?;
    let report = match a.measure {
        Measure::Gaussian => estimate_gaussian_integral(&poly, &cfg)?,
        Measure::Sphere => estimate_sphere_integral(&poly, &cfg)?,
    };
    let mut result = to_value(&report);
    result["measure"] = to_value(&a.measure);
    Ok(Output::Document { seed: Some(cfg.seed), result })
}

fn run_maximize(a: &MaximizeArgs) -> Result<Output, CliError> {
    let poly = parse_polynomial::<f64>(&read_input(&a.io)?)?;
    let seed = a.seed.ok_or_else(|| CliError::Validation("--seed is required for randomized commands".into()))?;
    let mut cfg = OptConfig::new(a.eps, seed).with_gamma(a.gamma).with_restarts(a.restarts);
    cfg.max_iters = a.max_iters;
    cfg.k_override = a.k;
    let report = maximize_on_sphere(&poly, &cfg)?;
    let mut result = to_value(&report);
    if let Some(p) = a.norm_power {
        result["norm_power"] = json!(p);
        result["norm_estimate"] = json!(max_via_norms(&poly, p, &cfg)?);
    }
    Ok(Output::Document { seed: Some(seed), result })
}

fn run_hafnian(a: &HafnianArgs) -> Result<Output, CliError> {
    let c = parse_sym_matrix::<f64>(&read_input(&a.io)?)?;
    if a.mode.exact {
        let value = hafnian(&c)?;
        return Ok(Output::Document { seed: None, result: json!({ "order": c.order(), "value": value }) });
    }
    let shift = match (a.shift, a.lambda) {
        (Shift::Explicit, Some(l)) => ShiftPolicy::Explicit(l),
        (Shift::Explicit, None) => return Err(CliError::Validation("--shift explicit needs --lambda".into())),
        (_, Some(_)) => return Err(CliError::Validation("--lambda only applies to --shift explicit".into())),
        (Shift::PsdAsGiven, None) => ShiftPolicy::PsdAsGiven,
        (Shift::MinEigenvalueShift, None) => ShiftPolicy::MinEigenvalueShift,
    };
    let cfg = a.sampling.config()?;
    let inst = HafnianInstance::new(c.clone(), shift)?;
    let report = approx_hafnian(&inst, &cfg)?;
    let mut result = to_value(&report);
    result["shift"] = to_value(&shift);
    if a.with_exact {
        result["exact"] = json!(hafnian(&c)?);
    }
    Ok(Output::Document { seed: Some(cfg.seed), result })
}

fn run_pair(a: &PairArgs) -> Result<Output, CliError> {
    let pair = parse_pair::<f64>(&read_input(&a.io)?)?;
    if a.mode.exact {
        let value = match a.method {
            PairMethod::Permanent => pairing_exact_permanent(&pair)?,
            PairMethod::Monomial => {
                let f = MonomialPolynomial::from_focused(pair.f())?;
                let g = MonomialPolynomial::from_focused(pair.g())?;
                pairing_exact_monomial(&f, &g)?
            }
        };
        let result = json!({ "method": a.method, "value": value, "n": pair.dimension(), "m": pair.degree() });
        return Ok(Output::Document { seed: None, result });
    }
    let cfg = a.sampling.config()?;
    let report = pairing_randomized(&pair, &cfg)?;
    Ok(Output::Document { seed: Some(cfg.seed), result: to_value(&report) })
}
