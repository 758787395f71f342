//! `tfbm`: simulate tempered fractional Brownian motion, run quadratic-form
//! goodness-of-fit tests, compute Monte Carlo power curves and quantile-line
//! diagnostics. All randomness is seeded; every run writes a JSON manifest
//! that `--replay` re-executes byte-identically.

mod commands;
mod manifest;
mod presets;
mod svg;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use tfbm::{Method, ProcessKind, ProcessSpec, StatKind};

#[derive(Parser, Debug)]
#[command(name = "tfbm", version, about = "Tempered fractional Brownian motion: simulation and goodness-of-fit testing")]
pub struct Cli {
    /// RNG seed; identical seeds reproduce outputs bit-exactly
    #[arg(long, global = true, env = "TFBM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Cap the rayon worker count
    #[arg(long, global = true, env = "TFBM_THREADS")]
    pub threads: Option<usize>,
    /// Output directory
    #[arg(long, global = true, env = "TFBM_OUT", default_value = ".")]
    pub out: PathBuf,
    /// Re-execute a recorded run from its manifest
    #[arg(long, global = true, env = "TFBM_REPLAY")]
    pub replay: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate trajectories and write them as CSV
    Simulate(SimulateArgs),
    /// Test observed trajectories (CSV) against a null process
    Test(TestArgs),
    /// Monte Carlo power study over a grid of alternatives
    Power(PowerArgs),
    /// Quantile-line diagnostics of a simulated batch
    Qlines(QlinesArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum KindArg {
    Tfbm1,
    Tfbm2,
    Tfbm3,
    Fbm,
}

impl From<KindArg> for ProcessKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Tfbm1 => ProcessKind::TfbmI,
            KindArg::Tfbm2 => ProcessKind::TfbmII,
            KindArg::Tfbm3 => ProcessKind::TfbmIII,
            KindArg::Fbm => ProcessKind::Fbm,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum StatArg {
    Acvf,
    Dma,
    Tamsd,
}

impl From<StatArg> for StatKind {
    fn from(s: StatArg) -> Self {
        match s {
            StatArg::Acvf => StatKind::Acvf,
            StatArg::Dma => StatKind::Dma,
            StatArg::Tamsd => StatKind::Tamsd,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum MethodArg {
    Auto,
    Cholesky,
    DaviesHarte,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Cholesky => Method::Cholesky,
            MethodArg::DaviesHarte => Method::DaviesHarte,
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct SpecArgs {
    /// Process kind
    #[arg(long, env = "TFBM_KIND")]
    pub kind: KindArg,
    /// Hurst index H
    #[arg(long, env = "TFBM_HURST")]
    pub hurst: f64,
    /// Tempering rate lambda (ignored for fbm)
    #[arg(long, env = "TFBM_LAMBDA", default_value_t = 0.0)]
    pub lambda: f64,
    /// Interpret --lambda as the tempering time tau* (tfbm3 only): lambda = 1/tau*
    #[arg(long, env = "TFBM_LAMBDA_IS_TAU_STAR")]
    pub lambda_is_tau_star: bool,
}

impl SpecArgs {
    pub fn to_spec(&self) -> tfbm::Result<ProcessSpec> {
        let kind: ProcessKind = self.kind.into();
        let lambda = if self.lambda_is_tau_star && kind == ProcessKind::TfbmIII && self.lambda > 0.0
        {
            1.0 / self.lambda
        } else {
            self.lambda
        };
        ProcessSpec::new(kind, self.hurst, lambda)
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Path length
    #[arg(long, env = "TFBM_N")]
    pub n: usize,
    /// Number of paths
    #[arg(long, env = "TFBM_M")]
    pub m: usize,
    #[arg(long, env = "TFBM_METHOD", value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Physical time horizon T: sample at t = kT/N (default: unit spacing)
    #[arg(long, env = "TFBM_HORIZON")]
    pub horizon: Option<f64>,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    /// Trajectory CSV (one path per row; '#' lines ignored)
    #[arg(long, env = "TFBM_INPUT")]
    pub input: PathBuf,
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, env = "TFBM_STAT", value_enum)]
    pub stat: StatArg,
    /// Statistic lag (defaults: acvf 1, dma 2, tamsd 1)
    #[arg(long, env = "TFBM_TAU")]
    pub tau: Option<usize>,
    #[arg(long, env = "TFBM_SIGNIFICANCE", default_value_t = 0.05)]
    pub significance: f64,
    /// Monte Carlo draws for the null distribution
    #[arg(long, env = "TFBM_NULL_DRAWS", default_value_t = 10_000)]
    pub null_draws: usize,
    /// Physical time horizon T of the input paths (default: unit spacing)
    #[arg(long, env = "TFBM_HORIZON")]
    pub horizon: Option<f64>,
}

#[derive(Args, Debug)]
pub struct PowerArgs {
    /// Named configuration (see --preset list)
    #[arg(long, env = "TFBM_PRESET")]
    pub preset: Option<String>,
    #[arg(long, env = "TFBM_KIND")]
    pub kind: Option<KindArg>,
    #[arg(long, env = "TFBM_HURST")]
    pub hurst: Option<f64>,
    #[arg(long, env = "TFBM_LAMBDA", default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, env = "TFBM_LAMBDA_IS_TAU_STAR")]
    pub lambda_is_tau_star: bool,
    /// Statistic(s) to run; preset default: all three
    #[arg(long, env = "TFBM_STAT", value_enum, value_delimiter = ',')]
    pub stat: Vec<StatArg>,
    #[arg(long, env = "TFBM_TAU")]
    pub tau: Option<usize>,
    /// Alternative kind (defaults to the null kind)
    #[arg(long)]
    pub alt_kind: Option<KindArg>,
    /// Alternative Hurst grid (comma separated); varies H
    #[arg(long, value_delimiter = ',')]
    pub alt_hurst: Vec<f64>,
    /// Alternative lambda grid (comma separated); varies lambda
    #[arg(long, value_delimiter = ',')]
    pub alt_lambda: Vec<f64>,
    #[arg(long, env = "TFBM_N")]
    pub n: Option<usize>,
    /// Monte Carlo replicates per alternative
    #[arg(long, env = "TFBM_M", default_value_t = 500)]
    pub m: usize,
    #[arg(long, env = "TFBM_NULL_DRAWS", default_value_t = 10_000)]
    pub null_draws: usize,
    #[arg(long, env = "TFBM_SIGNIFICANCE", default_value_t = 0.05)]
    pub significance: f64,
    /// Physical time horizon T: sample at t = kT/N (default: unit spacing)
    #[arg(long, env = "TFBM_HORIZON")]
    pub horizon: Option<f64>,
}

#[derive(Args, Debug)]
pub struct QlinesArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, env = "TFBM_N", default_value_t = 1000)]
    pub n: usize,
    #[arg(long, env = "TFBM_M", default_value_t = 1000)]
    pub m: usize,
    /// Probability levels (strictly increasing, in (0,1))
    #[arg(long, env = "TFBM_PROBS", value_delimiter = ',', default_values_t = [0.05, 0.25, 0.5, 0.75, 0.95])]
    pub probs: Vec<f64>,
    /// Physical time horizon T: sample at t = kT/N (default: unit spacing)
    #[arg(long, env = "TFBM_HORIZON")]
    pub horizon: Option<f64>,
}

/// CLI failure with its process exit code: 2 for bad input, 3 for numerics/IO.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: u8,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError { message: msg.into(), code: 2 }
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        CliError { message: msg.into(), code: 3 }
    }
}

impl From<tfbm::Error> for CliError {
    fn from(e: tfbm::Error) -> Self {
        use tfbm::Error::*;
        let code = match e {
            InvalidSpec(_) | Domain(_) | LagOutOfRange { .. } | DimensionMismatch(_)
            | InsufficientSample(_) => 2,
            _ => 3,
        };
        CliError { message: e.to_string(), code }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { message: e.to_string(), code: 3 }
    }
}

fn run(cli: Cli, argv: Vec<String>) -> Result<(), CliError> {
    if let Some(path) = &cli.replay {
        let m = manifest::RunManifest::load(path)
            .map_err(|e| CliError::usage(format!("cannot read manifest {}: {e}", path.display())))?;
        let mut replay_argv = vec!["tfbm".to_string()];
        replay_argv.extend(m.argv.iter().cloned());
        let replayed = Cli::try_parse_from(&replay_argv)
            .map_err(|e| CliError::usage(format!("manifest argv invalid: {e}")))?;
        if replayed.replay.is_some() {
            return Err(CliError::usage("manifest must not itself contain --replay"));
        }
        return run(replayed, m.argv);
    }
    if let Some(t) = cli.threads {
        // ignore failure: the global pool may already exist (e.g. under replay)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    std::fs::create_dir_all(&cli.out)?;
    match &cli.command {
        None => Err(CliError::usage("no command given (expected simulate | test | power | qlines)")),
        Some(Command::Simulate(args)) => commands::simulate(&cli, args, &argv),
        Some(Command::Test(args)) => commands::test(&cli, args, &argv),
        Some(Command::Power(args)) => commands::power(&cli, args, &argv),
        Some(Command::Qlines(args)) => commands::qlines(&cli, args, &argv),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version exit 0; genuine parse errors exit 2
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
