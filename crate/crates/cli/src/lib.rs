//! Command-line front end for the `intricacy` library.
//!
//! Exit status: 0 on success, 1 when a `verify` suite fails, 2 on usage or
//! input errors. Coordinates given on the command line are 1-based.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use intricacy::{
    build_table, exchangeability_distance, generate, intricacy_exact, intricacy_exchangeable, intricacy_mc,
    intricacy_via_entropies, kappa, load_system, maximize, save_system, support_stats, system_to_json,
    verify_suites, CoefficientTable, ExampleKind, JointDistribution, LambdaSpec, OptimizerConfig, Suite,
    SystemShape, VerifyOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "intricacy", version, about = "Intricacies of finite discrete random systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the intricacy of a system file
    Compute(ComputeArgs),
    /// Monte Carlo estimate of the intricacy of a system file
    Estimate(EstimateArgs),
    /// Search for a maximizing law over the simplex
    Maximize(MaximizeArgs),
    /// Write one of the example systems
    Generate(GenerateArgs),
    /// Print a coefficient table
    Coeffs(CoeffsArgs),
    /// Run a check suite and emit a JSON report
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Ets,
    Uniform,
    PSymmetric,
}

#[derive(Args, Debug)]
struct CoefficientArgs {
    /// Coefficient family
    #[arg(long, value_enum, conflicts_with = "coeff_file")]
    family: Option<Family>,
    /// Parameter of the p-symmetric family
    #[arg(long)]
    p: Option<f64>,
    /// JSON file describing the measure, e.g. {"family":"atomic","atoms":[{"x":0.2,"w":1.0}]}
    #[arg(long)]
    coeff_file: Option<PathBuf>,
}

impl CoefficientArgs {
    fn lambda(&self) -> Result<LambdaSpec, String> {
        if let Some(path) = &self.coeff_file {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            return serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()));
        }
        match (self.family.unwrap_or(Family::Ets), self.p) {
            (Family::PSymmetric, Some(p)) => LambdaSpec::two_point(p).map_err(|e| e.to_string()),
            (Family::PSymmetric, None) => Err("--family p-symmetric needs --p".into()),
            (_, Some(_)) => Err("--p only applies to --family p-symmetric".into()),
            (Family::Ets, None) => Ok(LambdaSpec::Lebesgue),
            (Family::Uniform, None) => Ok(LambdaSpec::UniformPoint),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Exact,
    Entropies,
    Exchangeable,
    Mc,
}

#[derive(Args, Debug)]
struct ComputeArgs {
    #[arg(long)]
    system: PathBuf,
    #[command(flatten)]
    coeffs: CoefficientArgs,
    #[arg(long, value_enum, default_value = "exact")]
    method: Method,
    /// Samples for --method mc
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long)]
    system: PathBuf,
    #[command(flatten)]
    coeffs: CoefficientArgs,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MaximizeArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    coeffs: CoefficientArgs,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Constrain the entropy to x·n·log d
    #[arg(long)]
    entropy_x: Option<f64>,
    /// Half-width of the entropy window, as a fraction of n·log d
    #[arg(long, default_value_t = 1e-3)]
    entropy_tol: f64,
    /// Entries below this count as forbidden configurations
    #[arg(long, default_value_t = 1e-6)]
    threshold: f64,
    /// Sweep n, n+1, …, n-max and write one CSV row per size to --csv
    #[arg(long, requires = "csv")]
    n_max: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    IidUniform,
    PointMass,
    Synchronized,
    SynchronizedSubsystem,
    ChainPair,
    EntropyPair,
    ReplicatedPairChain,
    N3Xor,
    N2Permutation,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    /// Entropy fraction for entropy-pair and replicated-pair-chain
    #[arg(long)]
    x: Option<f64>,
    /// Synchronized coordinates, 1-based, comma separated
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    /// Permutation of 0..d for n2-permutation, comma separated
    #[arg(long, value_delimiter = ',')]
    sigma: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CoeffsArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    coeffs: CoefficientArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ValueRecord {
    value: f64,
    method: &'static str,
    n: usize,
    d: usize,
    family: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize)]
struct SystemRecord<'a> {
    d: usize,
    n: usize,
    p: &'a [f64],
}

#[derive(Serialize)]
struct MaximizeRecord<'a> {
    value: f64,
    entropy: f64,
    iterations: usize,
    converged: bool,
    restart_index: usize,
    restart_values: &'a [f64],
    family: &'static str,
    seed: u64,
    support: usize,
    forbidden: usize,
    exchangeability_distance: f64,
    dist: SystemRecord<'a>,
}

#[derive(Serialize)]
struct CoeffsRecord<'a> {
    family: &'static str,
    n: usize,
    coefficients: &'a [f64],
    kappa: Option<f64>,
}

/// A failure that maps to an exit status.
struct Failure(i32, String);

impl From<String> for Failure {
    fn from(msg: String) -> Self {
        Failure(EXIT_USAGE, msg)
    }
}

impl From<intricacy::Error> for Failure {
    fn from(e: intricacy::Error) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

/// Parses `argv` (program name first) and runs the subcommand.
///
/// Results go to `--out` when given, else to `stdout`; diagnostics go to `stderr`.
pub fn run_command<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Compute(a) => compute(a, stdout),
        Command::Estimate(a) => estimate(a, stdout),
        Command::Maximize(a) => run_maximize(a, stdout),
        Command::Generate(a) => run_generate(a, stdout),
        Command::Coeffs(a) => coeffs(a, stdout),
        Command::Verify(a) => verify(a, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure(code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(|e| format!("{}: {e}", path.display()))?,
        None => writeln!(stdout, "{text}").map_err(|e| e.to_string())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("records serialize")
}

fn table_for(lambda: &LambdaSpec, n: usize) -> Result<CoefficientTable, Failure> {
    Ok(build_table(lambda, n)?)
}

fn compute(a: ComputeArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let lambda = a.coeffs.lambda()?;
    let dist = load_system(&a.system)?;
    let shape = dist.shape();
    let base = |value: f64, method| ValueRecord {
        value,
        method,
        n: shape.n(),
        d: shape.d(),
        family: lambda.family(),
        samples: None,
        stderr: None,
        seed: None,
    };
    let record = match a.method {
        Method::Mc => mc_record(&dist, &lambda, a.samples, a.seed)?,
        Method::Exact => base(intricacy_exact(&dist, &table_for(&lambda, shape.n())?)?.value(), "exact"),
        Method::Entropies => {
            base(intricacy_via_entropies(&dist, &table_for(&lambda, shape.n())?)?.value(), "entropies")
        }
        Method::Exchangeable => {
            base(intricacy_exchangeable(&dist, &table_for(&lambda, shape.n())?)?.value(), "exchangeable")
        }
    };
    emit(&to_json(&record), a.out.as_deref(), stdout)
}

fn mc_record(dist: &JointDistribution, lambda: &LambdaSpec, samples: u64, seed: u64) -> Result<ValueRecord, Failure> {
    let est = intricacy_mc(dist, lambda, samples, seed)?;
    Ok(ValueRecord {
        value: est.mean.value(),
        method: "mc",
        n: dist.shape().n(),
        d: dist.shape().d(),
        family: lambda.family(),
        samples: Some(est.samples),
        stderr: Some(est.stderr.value()),
        seed: Some(est.seed),
    })
}

fn estimate(a: EstimateArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let lambda = a.coeffs.lambda()?;
    let dist = load_system(&a.system)?;
    let record = mc_record(&dist, &lambda, a.samples, a.seed)?;
    emit(&to_json(&record), a.out.as_deref(), stdout)
}

fn run_maximize(a: MaximizeArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let lambda = a.coeffs.lambda()?;
    let config = OptimizerConfig {
        restarts: a.restarts,
        max_iters: a.iters,
        seed: a.seed,
        entropy_target_fraction: a.entropy_x,
        entropy_tol: a.entropy_tol,
        support_threshold: a.threshold,
        ..OptimizerConfig::default()
    };
    let solve = |n: usize| -> Result<_, Failure> {
        let shape = SystemShape::new(a.d, n)?;
        let result = maximize(shape, &table_for(&lambda, n)?, &config)?;
        let stats = support_stats(&result.dist, a.threshold)?;
        Ok((result, stats))
    };

    if let (Some(n_max), Some(csv_path)) = (a.n_max, &a.csv) {
        if n_max < a.n {
            return Err(format!("--n-max {n_max} is below --n {}", a.n).into());
        }
        let mut writer = csv::Writer::from_path(csv_path).map_err(|e| format!("{}: {e}", csv_path.display()))?;
        writer
            .write_record(["d", "n", "family", "value", "entropy", "forbidden", "converged"])
            .map_err(|e| e.to_string())?;
        for n in a.n..=n_max {
            let (r, stats) = solve(n)?;
            writer
                .write_record([
                    a.d.to_string(),
                    n.to_string(),
                    lambda.family().to_string(),
                    r.value.value().to_string(),
                    r.entropy.value().to_string(),
                    stats.forbidden.to_string(),
                    r.converged.to_string(),
                ])
                .map_err(|e| e.to_string())?;
        }
        writer.flush().map_err(|e| e.to_string())?;
        return Ok(());
    }

    let (r, stats) = solve(a.n)?;
    let record = MaximizeRecord {
        value: r.value.value(),
        entropy: r.entropy.value(),
        iterations: r.iterations,
        converged: r.converged,
        restart_index: r.restart_index,
        restart_values: &r.restart_values,
        family: lambda.family(),
        seed: a.seed,
        support: stats.support,
        forbidden: stats.forbidden,
        exchangeability_distance: exchangeability_distance(&r.dist),
        dist: SystemRecord { d: a.d, n: a.n, p: r.dist.probs() },
    };
    emit(&to_json(&record), a.out.as_deref(), stdout)
}

fn run_generate(a: GenerateArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let need_x = || a.x.ok_or_else(|| Failure::from("this kind needs --x".to_string()));
    let kind = match a.kind {
        Kind::IidUniform => ExampleKind::IidUniform,
        Kind::PointMass => ExampleKind::PointMass,
        Kind::Synchronized => ExampleKind::Synchronized,
        Kind::SynchronizedSubsystem => {
            if a.k.is_empty() || a.k.contains(&0) {
                return Err("--k takes 1-based coordinates, e.g. --k 1,3".to_string().into());
            }
            ExampleKind::SynchronizedSubsystem { k: a.k.iter().map(|i| i - 1).collect() }
        }
        Kind::ChainPair => ExampleKind::ChainPair,
        Kind::EntropyPair => ExampleKind::EntropyPair { x: need_x()? },
        Kind::ReplicatedPairChain => ExampleKind::ReplicatedPairChain { x: need_x()? },
        Kind::N3Xor => ExampleKind::N3Xor,
        Kind::N2Permutation => {
            let sigma = if a.sigma.is_empty() { (0..a.d).collect() } else { a.sigma.clone() };
            ExampleKind::N2Permutation { sigma }
        }
    };
    let dist = generate(&kind, SystemShape::new(a.d, a.n)?)?;
    match &a.out {
        Some(path) => save_system(&dist, path)?,
        None => writeln!(stdout, "{}", system_to_json(&dist)).map_err(|e| e.to_string())?,
    }
    Ok(())
}

fn coeffs(a: CoeffsArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let lambda = a.coeffs.lambda()?;
    let table = table_for(&lambda, a.n)?;
    let record = CoeffsRecord {
        family: lambda.family(),
        n: a.n,
        coefficients: table.coefficients(),
        kappa: kappa(&lambda).ok().map(|k| k.value()),
    };
    emit(&to_json(&record), a.out.as_deref(), stdout)
}

fn verify(a: VerifyArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let opts = VerifyOptions { seed: a.seed, trials: a.trials, tolerance: a.tolerance };
    let report = verify_suites(a.suite, &opts)?;
    emit(&to_json(&report), a.out.as_deref(), stdout)?;
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        Err(Failure(EXIT_VERIFY_FAILED, format!("failed checks: {}", failed.join(", "))))
    }
}
