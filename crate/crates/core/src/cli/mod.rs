//! `qnd-sim` command line.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage error, 3 domain
//! error. Every command that gets as far as knowing its `--out` directory
//! leaves a `manifest.json` there.

mod commands;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::QndError;
use output::{timestamp, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Environment variable capping worker threads (0 = automatic).
pub const THREADS_ENV: &str = "QND_SIM_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(QndError),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(QndError::Parse(_)) => EXIT_USAGE,
            CliError::Domain(_) | CliError::Io(_) => EXIT_DOMAIN,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<QndError> for CliError {
    fn from(e: QndError) -> Self {
        CliError::Domain(e)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qnd-sim",
    version,
    about = "Quadrature QND measurement simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the measurement chain for one outcome or a sampled batch.
    Chain(ChainArgs),
    /// Tabulate F and G over the trade-off parameter.
    Sweep(SweepArgs),
    /// Maximize F + G and locate F = G.
    Optimize(OptimizeArgs),
    /// Run the limit and consistency checks.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    /// Lattice nodes per state.
    #[arg(long = "grid-n", default_value_t = 2048)]
    pub grid_n: usize,
    /// Lattice half-width in standard deviations of each state.
    #[arg(long = "grid-span", default_value_t = 10.0)]
    pub grid_span: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChainArgs {
    /// Interferometer phase in radians, inside (0, pi/2).
    #[arg(long, allow_hyphen_values = true)]
    pub phi: f64,
    /// Probe quadrature variance.
    #[arg(long = "probe-var", allow_hyphen_values = true)]
    pub probe_var: f64,
    /// Signal state: gaussian:<mean>,<var> | cat:<sep>,<var> | file:<csv>.
    #[arg(long, default_value = "gaussian:0,0.25")]
    pub signal: String,
    /// Outcome x0 to condition on, or sample:<n> to draw n outcomes.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub outcome: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Conditional-output files written when sampling.
    #[arg(long = "max-conditionals", default_value_t = 10)]
    pub max_conditionals: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Closed,
    Numeric,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long = "x-min", default_value_t = 0.05)]
    pub x_min: f64,
    #[arg(long = "x-max", default_value_t = 5.0)]
    pub x_max: f64,
    /// Number of sweep points.
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = Mode::Closed)]
    pub mode: Mode,
    #[arg(long, default_value = "gaussian:0,0.25")]
    pub signal: String,
    /// Interferometer phase used in numeric mode.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    pub phi: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OptimizeArgs {
    #[arg(long, value_enum, default_value_t = Mode::Closed)]
    pub mode: Mode,
    #[arg(long, default_value = "gaussian:0,0.25")]
    pub signal: String,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long = "x-min", default_value_t = crate::optimizer::DEFAULT_BRACKET.0)]
    pub x_min: f64,
    #[arg(long = "x-max", default_value_t = crate::optimizer::DEFAULT_BRACKET.1)]
    pub x_max: f64,
    /// Interferometer phase used in numeric mode.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    pub phi: f64,
    /// Probe standard deviation; when given, report the phase realizing x_m.
    #[arg(long = "sigma-probe")]
    pub sigma_probe: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value = "gaussian:0,0.25")]
    pub signal: String,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
}

fn configure_threads() {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            // a second build in the same process is refused; keep the first
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
        Err(_) => log::warn!("ignoring {THREADS_ENV}={raw}: not an integer"),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    configure_threads();

    let (name, out, seed) = match &cli.command {
        Command::Chain(a) => ("chain", a.out.clone(), Some(a.seed)),
        Command::Sweep(a) => ("sweep", a.out.clone(), None),
        Command::Optimize(a) => ("optimize", a.out.clone(), None),
        Command::Validate(a) => ("validate", a.out.clone(), None),
    };
    let mut dir = match output::OutDir::create(&out) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let config = match &cli.command {
        Command::Chain(a) => serde_json::to_value(a),
        Command::Sweep(a) => serde_json::to_value(a),
        Command::Optimize(a) => serde_json::to_value(a),
        Command::Validate(a) => serde_json::to_value(a),
    }
    .unwrap_or(serde_json::Value::Null);

    let result = match &cli.command {
        Command::Chain(a) => commands::chain(a, &mut dir),
        Command::Sweep(a) => commands::sweep(a, &mut dir),
        Command::Optimize(a) => commands::optimize(a, &mut dir),
        Command::Validate(a) => commands::validate(a, &mut dir),
    };
    let (code, error) = match result {
        Ok(code) => (code, None),
        Err(e) => {
            eprintln!("error: {e}");
            (e.exit_code(), Some(e.to_string()))
        }
    };
    let manifest = RunManifest {
        command: name.to_string(),
        arguments: args
            .iter()
            .skip(1)
            .map(|a| a.to_string_lossy().into_owned())
            .collect(),
        config,
        outputs: dir.written().to_vec(),
        seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: timestamp(),
        exit_code: code,
        error,
    };
    if let Err(e) = manifest.write(dir.root()) {
        eprintln!("error: {e}");
        return code.max(EXIT_DOMAIN);
    }
    code
}
