//! Command-line harness: one subcommand per experiment, CSV on stdout or `--out`.
//!
//! Every run also writes a key=value manifest (to `<out>.manifest`, or to
//! stderr when the CSV goes to stdout). A manifest is itself a valid
//! `--config` file, so `qstack <cmd> --config run.manifest` repeats the run.
//!
//! Exit codes: 0 success, 1 invalid input, 2 internal failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use crate::avqe::{self, AqpeConfig, Oracle, Sampler};
use crate::error::Error;
use crate::qec;
use crate::rb::{self, RbConfig};
use crate::rng;
use crate::sampling;
use crate::sim::{NoiseModel, PauliString};
use crate::stack::{self, BandwidthSpec, CircuitModel, HardwareProfile};
use crate::zne::{self, Ensemble, Scaling};

const RESERVED_KEYS: [&str; 3] = ["version", "subcommand", "outputs"];

#[derive(Debug, Parser)]
#[command(
    name = "qstack",
    version,
    about = "Seeded experiments on CPU/QPU control-stack bottlenecks",
    after_help = "Symbols: --alpha α, --precision p, --distance d, --n-p n_P, --w-max W_max, --p-l p_L."
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Master seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// key=value file of flag defaults; explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Randomised benchmarking survival table and decay fit.
    Rb(RbArgs),
    /// Zero-noise extrapolation of a layered test circuit.
    Zne(ZneArgs),
    /// Samples needed for a target accuracy with circuit reuse.
    Variance(VarianceArgs),
    /// Measurement counts of phase estimation against α.
    AvqeMeasurements(AvqeMeasurementsArgs),
    /// Minimum measurement count under a depth budget.
    AvqeNmin(AvqeNminArgs),
    /// VQE versus AVQE gate totals over α.
    AvqeGates(AvqeGatesArgs),
    /// Single phase-estimation trace.
    AvqeRun(AvqeRunArgs),
    /// Iteration time against latency.
    Runtime(RuntimeArgs),
    /// Gate-stream instruction bandwidth.
    Bandwidth(BandwidthArgs),
    /// Idle fraction of a latency-bound while loop.
    Utilization(UtilizationArgs),
    /// Decoder backlog latency t_cycle·f^k.
    Backlog(BacklogArgs),
    /// QEC instruction bandwidth.
    QecBandwidth(QecBandwidthArgs),
    /// Per-shot Union-Find decoding summary.
    QecDecode(QecDecodeArgs),
    /// Logical failure rate Monte Carlo.
    QecLogical(QecLogicalArgs),
    /// Timeout failures against a work budget.
    QecTimeout(QecTimeoutArgs),
    /// Simple quantum volume.
    Sqv(SqvArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Rb(_) => "rb",
            Command::Zne(_) => "zne",
            Command::Variance(_) => "variance",
            Command::AvqeMeasurements(_) => "avqe-measurements",
            Command::AvqeNmin(_) => "avqe-nmin",
            Command::AvqeGates(_) => "avqe-gates",
            Command::AvqeRun(_) => "avqe-run",
            Command::Runtime(_) => "runtime",
            Command::Bandwidth(_) => "bandwidth",
            Command::Utilization(_) => "utilization",
            Command::Backlog(_) => "backlog",
            Command::QecBandwidth(_) => "qec-bandwidth",
            Command::QecDecode(_) => "qec-decode",
            Command::QecLogical(_) => "qec-logical",
            Command::QecTimeout(_) => "qec-timeout",
            Command::Sqv(_) => "sqv",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FitChoice {
    Separable,
    LogLinear,
}

#[derive(Debug, Args)]
pub struct RbArgs {
    #[arg(long, default_value_t = 1)]
    pub qubits: usize,
    #[arg(long, value_delimiter = ',', default_values_t = rb::DEFAULT_DEPTHS)]
    pub depths: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub sequences: usize,
    /// Shots per generated sequence.
    #[arg(long, default_value_t = 1)]
    pub reuse: usize,
    #[arg(long, default_value_t = 0.01)]
    pub depolarizing: f64,
    #[arg(long, default_value_t = 0.0)]
    pub readout_flip: f64,
    #[arg(long, value_enum, default_value = "separable")]
    pub fit: FitChoice,
    /// Fit CSV destination (stderr when absent).
    #[arg(long)]
    pub aux_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScalingChoice {
    Folding,
    Parameter,
}

#[derive(Debug, Args)]
pub struct ZneArgs {
    #[arg(long, default_value_t = 2)]
    pub qubits: usize,
    #[arg(long, default_value_t = 2)]
    pub layers: usize,
    /// Pauli string such as ZZ (all-Z by default).
    #[arg(long)]
    pub observable: Option<String>,
    #[arg(long, value_enum, default_value = "folding")]
    pub scaling: ScalingChoice,
    /// Identity blocks per layer, one entry per level (folding).
    #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2])]
    pub blocks: Vec<usize>,
    /// Noise levels λ (parameter scaling).
    #[arg(long, value_delimiter = ',', default_values_t = zne::DEFAULT_LAMBDAS)]
    pub lambdas: Vec<f64>,
    /// Angle variance σ₀² at λ = 2.
    #[arg(long, default_value_t = 0.05)]
    pub reference_variance: f64,
    #[arg(long, default_value_t = 2000)]
    pub shots: usize,
    #[arg(long, default_value_t = 0.01)]
    pub depolarizing: f64,
    #[arg(long, default_value_t = 0.0)]
    pub readout_flip: f64,
    /// richardson, linear, polyK or exponential.
    #[arg(long, default_value = "richardson")]
    pub method: String,
    /// Extrapolation CSV destination (stderr when absent).
    #[arg(long)]
    pub aux_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VarianceArgs {
    #[arg(long, default_value_t = 0.5)]
    pub mu: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.005, 0.01, 0.02, 0.05])]
    pub sigma2: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 5, 10, 20])]
    pub l: Vec<u64>,
    /// Target standard deviation of the estimate.
    #[arg(long, default_value_t = 0.01)]
    pub target: f64,
}

#[derive(Debug, Args)]
pub struct AvqeMeasurementsArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.01])]
    pub precision: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.25, 0.5, 0.75, 1.0])]
    pub alpha: Vec<f64>,
    /// Simulated runs per point for the empirical median (0 skips it).
    #[arg(long, default_value_t = 0)]
    pub runs: u64,
}

#[derive(Debug, Args)]
pub struct AvqeNminArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.01, 0.001])]
    pub precision: Vec<f64>,
    /// Maximum circuit depth D.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0, 100.0, 1000.0])]
    pub depth: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct AvqeGatesArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub precision: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5])]
    pub alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [10u64, 1000])]
    pub n_p: Vec<u64>,
    #[arg(long, default_value_t = 25)]
    pub seeds: u64,
    /// Crossover CSV destination (stderr when absent).
    #[arg(long)]
    pub aux_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct AvqeRunArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    pub precision: f64,
    /// True phase in [-π, π]; drawn from the seed when absent.
    #[arg(long)]
    pub phi: Option<f64>,
    /// Eigenvector sign ±1 (with --phi).
    #[arg(long, default_value_t = 1)]
    pub sign: i8,
    /// stratified or independent.
    #[arg(long, default_value = "stratified")]
    pub sampler: String,
    #[arg(long, default_value_t = 1000)]
    pub batch: usize,
    #[arg(long, default_value_t = 5_000_000)]
    pub max_iterations: u64,
    /// Summary CSV destination (stderr when absent).
    #[arg(long)]
    pub aux_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RuntimeArgs {
    #[arg(long, value_delimiter = ',', default_values_t = ["superconducting".to_string(), "trapped_ion".to_string()])]
    pub profile: Vec<String>,
    /// One-way latencies in seconds.
    #[arg(long, value_delimiter = ',', default_values_t = [1e-6, 1e-5, 1e-4, 1e-3])]
    pub latency: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 10, 100, 1000])]
    pub m: Vec<u32>,
    /// Use the gate-count circuit model with this many Pauli terms.
    #[arg(long)]
    pub n_p: Option<u64>,
    /// Bayesian update time in seconds.
    #[arg(long)]
    pub update_time: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BandwidthArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [150u64])]
    pub qubits: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_values_t = [120e-9])]
    pub gate_time: Vec<f64>,
    #[arg(long, alias = "utilization", default_value_t = 0.5)]
    pub utilisation: f64,
    #[arg(long, default_value_t = stack::SINGLE_QUBIT_GATE_BYTES)]
    pub bytes_per_gate: f64,
}

#[derive(Debug, Args)]
pub struct UtilizationArgs {
    #[arg(long, default_value = "trapped_ion")]
    pub profile: String,
    #[arg(long, value_delimiter = ',', default_values_t = [800e-6])]
    pub circuit_time: Vec<f64>,
    /// One-way latency override in seconds.
    #[arg(long)]
    pub latency: Option<f64>,
    /// Zeros to collect before the loop exits.
    #[arg(long, default_value_t = 100)]
    pub zeros: u64,
    /// Probability of measuring 0.
    #[arg(long, default_value_t = 0.5)]
    pub bias: f64,
    /// Decide next to the QPU (no round trip).
    #[arg(long)]
    pub local: bool,
}

#[derive(Debug, Args)]
pub struct BacklogArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 1.5, 2.0])]
    pub f: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 10, 100, 686])]
    pub k: Vec<u64>,
    #[arg(long, default_value_t = 400e-9)]
    pub t_cycle: f64,
}

#[derive(Debug, Args)]
pub struct QecBandwidthArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 100_000])]
    pub qubits: Vec<u64>,
    /// Instructions per second per qubit.
    #[arg(long, default_value_t = 100e6)]
    pub rate: f64,
    #[arg(long, default_value_t = 1.0)]
    pub bytes: f64,
}

#[derive(Debug, Args)]
pub struct QecDecodeArgs {
    #[arg(long, default_value_t = 3)]
    pub distance: usize,
    /// Syndrome rounds including the final perfect one (default d).
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub p_data: f64,
    /// Defaults to --p-data.
    #[arg(long)]
    pub p_meas: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub shots: u64,
}

#[derive(Debug, Args)]
pub struct QecLogicalArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [3usize, 5])]
    pub distance: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.005, 0.01, 0.02])]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
}

/// Work budget; `inf` is unlimited.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub Option<u64>);

impl std::str::FromStr for Budget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "inf" | "infinity" => Ok(Budget(None)),
            _ => s.parse().map(|w| Budget(Some(w))).map_err(|e| format!("{e}")),
        }
    }
}

impl std::fmt::Display for Budget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Some(w) => write!(f, "{w}"),
            None => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Args)]
pub struct QecTimeoutArgs {
    #[arg(long, default_value_t = 3)]
    pub distance: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.01])]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [Budget(Some(0)), Budget(Some(100)), Budget(Some(1000)), Budget(None)])]
    pub w_max: Vec<Budget>,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    /// Per-shot work units as CSV.
    #[arg(long)]
    pub work_dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SqvArgs {
    #[arg(long, default_value_t = 78)]
    pub n_logical: u64,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1e-3, 1e-4])]
    pub p_l: Vec<f64>,
}

#[derive(Debug)]
enum CliError {
    /// Already reported by clap.
    Usage,
    Validation(String),
    Internal(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

fn command() -> clap::Command {
    Cli::command().mut_subcommands(|s| s.args_override_self(true))
}

/// Shortest round-trip representation, e.g. `1.25e9`.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Entry point for the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    match parse(args).and_then(execute) {
        Ok(()) => 0,
        Err(CliError::Usage) => 1,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            2
        }
    }
}

struct Invocation {
    cli: Cli,
    params: Vec<(String, String)>,
}

fn clap_failure(e: clap::Error) -> CliError {
    let _ = e.print();
    if e.use_stderr() {
        CliError::Usage
    } else {
        // --help and --version
        std::process::exit(0)
    }
}

fn parse(mut args: Vec<OsString>) -> Result<Invocation, CliError> {
    let cmd = command();
    let mut matches = cmd.clone().try_get_matches_from(&args).map_err(clap_failure)?;
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let name = name.to_string();
    if let Some(path) = sub.get_one::<PathBuf>("config") {
        let extra = config_tokens(&cmd, &name, path, sub)?;
        let at = args
            .iter()
            .position(|a| a.to_str() == Some(name.as_str()))
            .expect("subcommand appears in argv");
        args.splice(at + 1..at + 1, extra);
        matches = cmd.clone().try_get_matches_from(&args).map_err(clap_failure)?;
    }
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::Validation(e.to_string()))?;
    let (_, sub) = matches.subcommand().expect("subcommand is required");
    let sub_cmd = cmd.find_subcommand(&name).expect("known subcommand");
    let mut params = Vec::new();
    for arg in known_arguments(&cmd, sub_cmd) {
        let id = arg.get_id().as_str();
        let Some(long) = arg.get_long() else { continue };
        if matches!(id, "config" | "help" | "version") {
            continue;
        }
        if let Ok(Some(raw)) = sub.try_get_raw(id) {
            let vals: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
            params.push((long.to_string(), vals.join(",")));
        }
    }
    params.sort();
    Ok(Invocation { cli, params })
}

/// Subcommand flags followed by the global ones.
fn known_arguments<'a>(root: &'a clap::Command, sub: &'a clap::Command) -> impl Iterator<Item = &'a clap::Arg> {
    sub.get_arguments().chain(root.get_arguments().filter(|a| a.is_global_set()))
}

/// Flags from a config file, minus those already given on the command line.
fn config_tokens(
    cmd: &clap::Command,
    name: &str,
    path: &Path,
    given: &clap::ArgMatches,
) -> Result<Vec<OsString>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    let sub = cmd.find_subcommand(name).expect("known subcommand");
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| CliError::Validation(format!("config line {}: expected key=value", lineno + 1)))?;
        if RESERVED_KEYS.contains(&key) {
            if key == "subcommand" && value != name {
                return Err(CliError::Validation(format!(
                    "config is for `{value}`, not `{name}`"
                )));
            }
            continue;
        }
        let arg = known_arguments(cmd, sub)
            .find(|a| a.get_long() == Some(key) && key != "config")
            .ok_or_else(|| CliError::Validation(format!("config line {}: unknown key `{key}`", lineno + 1)))?;
        if given.value_source(arg.get_id().as_str()) == Some(clap::parser::ValueSource::CommandLine) {
            continue;
        }
        if arg.get_action().takes_values() {
            out.push(OsString::from(format!("--{key}={value}")));
        } else {
            match value {
                "true" => out.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => {
                    return Err(CliError::Validation(format!(
                        "config line {}: `{key}` expects true or false",
                        lineno + 1
                    )))
                }
            }
        }
    }
    Ok(out)
}

/// Collected outputs of one run.
struct Outputs {
    main: String,
    aux: Option<(Option<PathBuf>, String)>,
    extra: Vec<(PathBuf, String)>,
}

impl Outputs {
    fn new(main: String) -> Self {
        Outputs {
            main,
            aux: None,
            extra: Vec::new(),
        }
    }

    fn with_aux(mut self, path: Option<PathBuf>, csv: String) -> Self {
        self.aux = Some((path, csv));
        self
    }
}

fn execute(inv: Invocation) -> Result<(), CliError> {
    let Invocation { cli, params } = inv;
    if let Some(n) = cli.common.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let seed = cli.common.seed;
    let name = cli.command.name();
    let outputs = match &cli.command {
        Command::Rb(a) => cmd_rb(a, seed)?,
        Command::Zne(a) => cmd_zne(a, seed)?,
        Command::Variance(a) => cmd_variance(a)?,
        Command::AvqeMeasurements(a) => cmd_avqe_measurements(a, seed)?,
        Command::AvqeNmin(a) => cmd_avqe_nmin(a)?,
        Command::AvqeGates(a) => cmd_avqe_gates(a, seed)?,
        Command::AvqeRun(a) => cmd_avqe_run(a, seed)?,
        Command::Runtime(a) => cmd_runtime(a)?,
        Command::Bandwidth(a) => cmd_bandwidth(a)?,
        Command::Utilization(a) => cmd_utilization(a, seed)?,
        Command::Backlog(a) => cmd_backlog(a)?,
        Command::QecBandwidth(a) => cmd_qec_bandwidth(a)?,
        Command::QecDecode(a) => cmd_qec_decode(a, seed)?,
        Command::QecLogical(a) => cmd_qec_logical(a, seed)?,
        Command::QecTimeout(a) => cmd_qec_timeout(a, seed)?,
        Command::Sqv(a) => cmd_sqv(a)?,
    };

    let mut written = Vec::new();
    match &cli.common.out {
        Some(p) => {
            fs::write(p, &outputs.main)?;
            written.push(p.display().to_string());
        }
        None => {
            std::io::stdout().write_all(outputs.main.as_bytes())?;
            written.push("stdout".into());
        }
    }
    if let Some((path, csv)) = &outputs.aux {
        match path {
            Some(p) => {
                fs::write(p, csv)?;
                written.push(p.display().to_string());
            }
            None => std::io::stderr().write_all(csv.as_bytes())?,
        }
    }
    for (p, csv) in &outputs.extra {
        fs::write(p, csv)?;
        written.push(p.display().to_string());
    }

    let mut manifest = String::from("# qstack run manifest\n");
    let _ = writeln!(manifest, "version={}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(manifest, "subcommand={name}");
    for (k, v) in &params {
        let _ = writeln!(manifest, "{k}={v}");
    }
    let _ = writeln!(manifest, "outputs={}", written.join(","));
    match &cli.common.out {
        Some(p) => {
            let mut mp = p.clone().into_os_string();
            mp.push(".manifest");
            fs::write(PathBuf::from(mp), manifest)?;
        }
        None => std::io::stderr().write_all(manifest.as_bytes())?,
    }
    Ok(())
}

fn csv(header: &str) -> String {
    format!("{header}\n")
}

fn row(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

fn cmd_rb(a: &RbArgs, seed: u64) -> Result<Outputs, CliError> {
    let noise = NoiseModel::new(a.depolarizing, a.readout_flip)?;
    let mut config = RbConfig::new(a.qubits, noise, seed);
    config.depths = a.depths.clone();
    config.sequences_per_depth = a.sequences;
    config.reuse_factor = a.reuse;
    let table = rb::estimate_survival(&config)?;
    let mut out = csv("m,n_circuits,shots_per_circuit,survival_mean,survival_stderr");
    for p in &table {
        row(
            &mut out,
            &[
                p.m.to_string(),
                p.n_circuits.to_string(),
                p.shots_per_circuit.to_string(),
                num(p.mean),
                num(p.stderr),
            ],
        );
    }
    let fit = match a.fit {
        FitChoice::Separable => rb::fit_decay(&table)?,
        FitChoice::LogLinear => rb::fit_log_linear(&table)?,
    };
    let mut f = csv("A,B,p,residual,method");
    row(
        &mut f,
        &[num(fit.a), num(fit.b), num(fit.p), num(fit.residual), fit.method.name().into()],
    );
    Ok(Outputs::new(out).with_aux(a.aux_out.clone(), f))
}

fn cmd_zne(a: &ZneArgs, seed: u64) -> Result<Outputs, CliError> {
    let base = zne::layered_ansatz(a.qubits, a.layers, rng::derive(seed, &[0]))?;
    let observable: PauliString = match &a.observable {
        Some(s) => s.parse()?,
        None => "Z".repeat(a.qubits).parse()?,
    };
    let method: zne::Method = a.method.parse()?;
    let scaling = match a.scaling {
        ScalingChoice::Folding => Scaling::UnitaryFolding {
            blocks_per_layer: a.blocks.clone(),
        },
        ScalingChoice::Parameter => Scaling::ParameterScaling {
            lambdas: a.lambdas.clone(),
            reference_variance: a.reference_variance,
        },
    };
    let ensemble = Ensemble {
        base,
        scaling,
        shots: a.shots,
        noise: NoiseModel::new(a.depolarizing, a.readout_flip)?,
        seed: rng::derive(seed, &[1]),
    };
    let table = zne::collect(&ensemble, &observable)?;
    let mut out = csv("lambda,shots,e_mean,e_stderr");
    for l in &table {
        row(&mut out, &[num(l.lambda), l.shots.to_string(), num(l.mean), num(l.stderr)]);
    }
    let x = zne::extrapolate(&table, method)?;
    let mut f = csv("method,e_zero,e_zero_stderr,residual,rate,fell_back");
    row(
        &mut f,
        &[
            x.method.name(),
            num(x.e_zero),
            num(x.e_zero_stderr),
            num(x.residual),
            x.rate.map(num).unwrap_or_default(),
            x.fell_back.to_string(),
        ],
    );
    Ok(Outputs::new(out).with_aux(a.aux_out.clone(), f))
}

fn cmd_variance(a: &VarianceArgs) -> Result<Outputs, CliError> {
    let mut out = csv("sigma2,l,samples_required");
    for &s2 in &a.sigma2 {
        for &l in &a.l {
            let n = sampling::samples_required(a.mu, s2, l, a.target)?;
            row(&mut out, &[num(s2), l.to_string(), n.to_string()]);
        }
    }
    Ok(Outputs::new(out))
}

fn cmd_avqe_measurements(a: &AvqeMeasurementsArgs, seed: u64) -> Result<Outputs, CliError> {
    let mut out = csv("alpha,p,n_formula,n_empirical_median");
    for &alpha in &a.alpha {
        for &p in &a.precision {
            let formula = avqe::n_measurements(p, alpha)?;
            let empirical = if a.runs > 0 {
                let base = AqpeConfig::new(alpha, p, rng::derive(seed, &[p.to_bits()]));
                let runs = avqe::simulate_runs(&base, alpha, a.runs)?;
                let its: Vec<f64> = runs.iter().map(|r| r.iterations as f64).collect();
                num(crate::fit::median(&its))
            } else {
                String::new()
            };
            row(&mut out, &[num(alpha), num(p), num(formula), empirical]);
        }
    }
    Ok(Outputs::new(out))
}

fn cmd_avqe_nmin(a: &AvqeNminArgs) -> Result<Outputs, CliError> {
    let mut out = csv("p,d,alpha_max,n_min");
    for &p in &a.precision {
        for &d in &a.depth {
            row(
                &mut out,
                &[num(p), num(d), num(avqe::alpha_max(p, d)?), num(avqe::n_min(p, d)?)],
            );
        }
    }
    Ok(Outputs::new(out))
}

fn cmd_avqe_gates(a: &AvqeGatesArgs, seed: u64) -> Result<Outputs, CliError> {
    if a.seeds == 0 {
        return Err(CliError::Validation("--seeds must be at least 1".into()));
    }
    let base = AqpeConfig::new(0.0, a.precision, seed);
    base.validate()?;
    let (table, found) = avqe::crossover(&base, &a.alpha, &a.n_p, a.seeds)?;
    let mut out = csv("alpha,vqe_gates,avqe_gates,n_P");
    for c in &table {
        row(&mut out, &[num(c.alpha), num(c.vqe), num(c.avqe), c.n_p.to_string()]);
    }
    let mut f = csv("n_P,alpha_crossover");
    for (n_p, alpha) in a.n_p.iter().zip(found) {
        row(&mut f, &[n_p.to_string(), alpha.map(num).unwrap_or_default()]);
    }
    Ok(Outputs::new(out).with_aux(a.aux_out.clone(), f))
}

fn cmd_avqe_run(a: &AvqeRunArgs, seed: u64) -> Result<Outputs, CliError> {
    let mut config = AqpeConfig::new(a.alpha, a.precision, seed);
    config.sampler = a.sampler.parse::<Sampler>()?;
    config.batch = a.batch;
    config.max_iterations = a.max_iterations;
    config.record_history = true;
    let oracle = match a.phi {
        Some(phi) => Oracle::analytic(phi, a.sign)?,
        None => avqe::random_oracle(seed)?,
    };
    let run = avqe::estimate_phase(&config, &oracle)?;
    let mut out = csv("iter,M,theta,E,accepted,mu,sigma");
    for (i, r) in run.history.iter().enumerate() {
        row(
            &mut out,
            &[
                (i + 1).to_string(),
                r.m.to_string(),
                num(r.theta),
                r.e.to_string(),
                r.accepted.to_string(),
                num(r.mu),
                num(r.sigma),
            ],
        );
    }
    let target = oracle.target();
    let mut f = csv("target,estimate,error,sigma,iterations,converged,fallbacks");
    row(
        &mut f,
        &[
            num(target),
            num(run.estimate),
            num(run.error(target)),
            num(run.sigma),
            run.iterations.to_string(),
            run.converged.to_string(),
            run.fallbacks.to_string(),
        ],
    );
    Ok(Outputs::new(out).with_aux(a.aux_out.clone(), f))
}

fn cmd_runtime(a: &RuntimeArgs) -> Result<Outputs, CliError> {
    let model = match a.n_p {
        Some(n_p) => CircuitModel::GateCount { n_p },
        None => CircuitModel::DepthOnly,
    };
    let mut out = csv("latency_s,M,T_s,profile");
    for name in &a.profile {
        let mut profile = HardwareProfile::by_name(name)?;
        if let Some(t_b) = a.update_time {
            profile = HardwareProfile::new(
                &profile.name,
                profile.t_gate,
                profile.t_meas,
                profile.t_reset,
                profile.t_lat,
                t_b,
            )?;
        }
        for &lat in &a.latency {
            let p = HardwareProfile::new(&profile.name, profile.t_gate, profile.t_meas, profile.t_reset, lat, profile.t_b)?;
            for &m in &a.m {
                let t = stack::aqpe_iteration_time(&p, m, model);
                row(&mut out, &[num(lat), m.to_string(), num(t), p.name.clone()]);
            }
        }
    }
    Ok(Outputs::new(out))
}

fn cmd_bandwidth(a: &BandwidthArgs) -> Result<Outputs, CliError> {
    let mut out = csv("gate_time_s,n_qubits,bandwidth_Bps");
    for &t_gate in &a.gate_time {
        for &n in &a.qubits {
            let bw = stack::gate_stream_bandwidth(&BandwidthSpec {
                n_qubits: n,
                utilisation: a.utilisation,
                bytes_per_gate: a.bytes_per_gate,
                t_gate,
            })?;
            row(&mut out, &[num(t_gate), n.to_string(), num(bw)]);
        }
    }
    Ok(Outputs::new(out))
}

fn cmd_utilization(a: &UtilizationArgs, seed: u64) -> Result<Outputs, CliError> {
    let mut profile = HardwareProfile::by_name(&a.profile)?;
    if let Some(lat) = a.latency {
        profile = HardwareProfile::new(&profile.name, profile.t_gate, profile.t_meas, profile.t_reset, lat, profile.t_b)?;
    }
    let closed_profile = if a.local { profile.with_latency(0.0) } else { profile.clone() };
    let mut out = csv("profile,circuit_time_s,idle_closed_form,idle_simulated,iterations");
    for (i, &t) in a.circuit_time.iter().enumerate() {
        let closed = stack::while_loop_idle_fraction(&closed_profile, t)?;
        let sim = stack::simulate_while_loop(&profile, t, a.zeros, a.bias, a.local, rng::derive(seed, &[i as u64]))?;
        row(
            &mut out,
            &[
                profile.name.clone(),
                num(t),
                num(closed),
                num(sim.idle_fraction()),
                sim.iterations.to_string(),
            ],
        );
    }
    Ok(Outputs::new(out))
}

fn cmd_backlog(a: &BacklogArgs) -> Result<Outputs, CliError> {
    let mut out = csv("f,k,log10_seconds");
    for &f in &a.f {
        for &k in &a.k {
            let b = stack::backlog_from_factor(f, k, a.t_cycle)?;
            row(&mut out, &[num(f), k.to_string(), num(b.log10_seconds)]);
        }
    }
    Ok(Outputs::new(out))
}

fn cmd_qec_bandwidth(a: &QecBandwidthArgs) -> Result<Outputs, CliError> {
    let mut out = csv("n_qubits,op_rate_hz,bytes_per_instruction,bandwidth_Bps");
    for &n in &a.qubits {
        let bw = stack::qec_instruction_bandwidth(n, a.rate, a.bytes)?;
        row(&mut out, &[n.to_string(), num(a.rate), num(a.bytes), num(bw)]);
    }
    Ok(Outputs::new(out))
}

fn cmd_qec_decode(a: &QecDecodeArgs, seed: u64) -> Result<Outputs, CliError> {
    let graph = qec::DecodingGraph::new(a.distance, a.rounds.unwrap_or(a.distance))?;
    let p_meas = a.p_meas.unwrap_or(a.p_data);
    let mut out = csv("shot,hot,error_weight,correction_weight,work_units,logical_failure");
    for shot in 0..a.shots {
        let mut r = rng::stream(seed, &[shot]);
        let hist = qec::sample_with(&graph, a.p_data, p_meas, &mut r)?;
        let dec = qec::decode(&graph, &hist.hot);
        if graph.syndrome(&dec.correction) != hist.hot {
            return Err(CliError::Internal(format!("shot {shot}: correction does not match syndrome")));
        }
        let fail = qec::is_logical_failure(&graph, &hist.error, &dec.correction);
        row(
            &mut out,
            &[
                shot.to_string(),
                hist.hot.len().to_string(),
                hist.error.len().to_string(),
                dec.correction.len().to_string(),
                dec.work_units.to_string(),
                fail.to_string(),
            ],
        );
    }
    Ok(Outputs::new(out))
}

fn cmd_qec_logical(a: &QecLogicalArgs, seed: u64) -> Result<Outputs, CliError> {
    let mut out = csv("d,p,shots,p_log,p_log_stderr");
    for &d in &a.distance {
        for &p in &a.p {
            let e = qec::logical_failure_rate(d, p, a.shots, rng::derive(seed, &[d as u64, p.to_bits()]))?;
            row(&mut out, &[d.to_string(), num(p), e.shots.to_string(), num(e.value), num(e.stderr)]);
        }
    }
    Ok(Outputs::new(out))
}

fn cmd_qec_timeout(a: &QecTimeoutArgs, seed: u64) -> Result<Outputs, CliError> {
    if a.shots == 0 {
        return Err(CliError::Validation("--shots must be at least 1".into()));
    }
    let mut out = csv("d,p,W_max,p_toe,inequality_holds");
    let mut dump = csv("d,p,shot,work_units");
    for &p in &a.p {
        let results = qec::run_shots(a.distance, p, a.shots, rng::derive(seed, &[p.to_bits()]))?;
        for w in &a.w_max {
            let s = qec::timeout_summary(&results, w.0);
            row(
                &mut out,
                &[
                    a.distance.to_string(),
                    num(p),
                    w.to_string(),
                    num(s.p_toe.value),
                    s.inequality_holds.to_string(),
                ],
            );
        }
        for (i, r) in results.iter().enumerate() {
            row(&mut dump, &[a.distance.to_string(), num(p), i.to_string(), r.work_units.to_string()]);
        }
    }
    let mut outputs = Outputs::new(out);
    if let Some(path) = &a.work_dump {
        outputs.extra.push((path.clone(), dump));
    }
    Ok(outputs)
}

fn cmd_sqv(a: &SqvArgs) -> Result<Outputs, CliError> {
    let mut out = csv("n_logical,p_L,sqv");
    for &p in &a.p_l {
        row(&mut out, &[a.n_logical.to_string(), num(p), num(qec::sqv(a.n_logical, p)?)]);
    }
    Ok(Outputs::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parser_is_consistent() {
        command().debug_assert();
    }

    #[test]
    fn number_format() {
        assert_eq!(num(1.25e9), "1.25e9");
        assert_eq!(num(0.2), "2e-1");
        assert_eq!(num(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn budget_parsing() {
        assert_eq!("inf".parse::<Budget>().unwrap(), Budget(None));
        assert_eq!("12".parse::<Budget>().unwrap(), Budget(Some(12)));
        assert!("x".parse::<Budget>().is_err());
    }
}
