//! `qladder`: spectra, survival dynamics, reference curves and the
//! validation suite from the command line.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qladder::Error;

/// Exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VALIDATION: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const SOLVER: u8 = 3;
    pub const DEGENERATE: u8 = 4;
}

#[derive(Debug, Parser)]
#[command(name = "qladder", version, about = "Discrete level coupled to a Lorentzian-weighted ladder")]
struct Cli {
    /// Run every computation on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues and discrete-state weights.
    Spectrum(SpectrumArgs),
    /// Survival probability of the discrete state.
    Dynamics(DynamicsArgs),
    /// Reference-model survival curves.
    Limits(LimitsArgs),
    /// All panels of a figure preset with their reference curves.
    Compare(CompareArgs),
    /// Run the invariant suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ModelFlags {
    /// Peak coupling v.
    #[arg(long)]
    pub v: Option<f64>,
    /// Ladder spacing δ.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Dimensionless coupling width a = γ/δ.
    #[arg(long)]
    pub a: Option<f64>,
    /// Discrete-level energy.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub e_phi: f64,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelFlags,
    /// Lower window edge in units of δ (default: adaptive window).
    #[arg(long, requires = "window_max", allow_negative_numbers = true)]
    pub window_min: Option<f64>,
    #[arg(long, requires = "window_min", allow_negative_numbers = true)]
    pub window_max: Option<f64>,
    /// Adaptive window: stop once the weight deficit is below this.
    #[arg(long, default_value_t = 1e-6)]
    pub deficit: f64,
    /// Adaptive window: largest width in units of δ.
    #[arg(long, default_value_t = 2000.0)]
    pub max_width: f64,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Semi,
    Oracle,
    Both,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    /// Preset panel such as `beta05-a20`; supplies the model and time range.
    #[arg(long, conflicts_with_all = ["v", "delta", "a"])]
    pub preset: Option<String>,
    #[command(flatten)]
    pub model: ModelFlags,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of grid intervals.
    #[arg(long, default_value_t = qladder::dynamics::DEFAULT_STEPS)]
    pub t_steps: usize,
    /// Ladder cutoff of the dense oracle.
    #[arg(long, default_value_t = 300)]
    pub n_cut: usize,
    #[arg(long, value_enum, default_value_t = Engine::Semi)]
    pub engine: Engine,
    /// Divide the semi-analytic curve by the squared captured weight.
    #[arg(long)]
    pub renormalize: bool,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LimitKind {
    Rabi,
    Bj,
    Ww,
    Fano,
}

#[derive(Debug, Args)]
pub struct LimitsArgs {
    #[arg(long, value_enum)]
    pub kind: LimitKind,
    /// Continuum preset (`overdamped`, `underdamped`, `intermediate`) for `fano`.
    #[arg(long)]
    pub preset: Option<String>,
    /// Coupling (rabi, bj).
    #[arg(long)]
    pub v: Option<f64>,
    /// Ladder spacing (bj).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Level energy (rabi, bj, fano).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub e_phi: f64,
    /// Decay rate Γ (ww).
    #[arg(long)]
    pub big_gamma: Option<f64>,
    /// Continuum coupling W (fano).
    #[arg(long)]
    pub w: Option<f64>,
    /// Coupling half-width γ (fano).
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = qladder::dynamics::DEFAULT_STEPS)]
    pub t_steps: usize,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub preset: String,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: std::path::PathBuf,
    /// Also write one SVG plot per panel.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Corrupt α(a) by this amount (suite self-test).
    #[arg(long, hide = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub perturb_alpha: f64,
}

/// Error carrying its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: exit::USAGE, message: message.into() }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        Self { code: exit::SOLVER, message: format!("cannot write {}: {e}", path.display()) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams(_) => exit::USAGE,
            Error::Degenerate(_) => exit::DEGENERATE,
            _ => exit::SOLVER,
        };
        Self { code, message: e.to_string() }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("QLADDER_THREADS") else {
        return Ok(());
    };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return Err(Failure::usage(format!("QLADDER_THREADS must be a positive integer, got '{raw}'"))),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure { code: exit::SOLVER, message: format!("cannot start thread pool: {e}") })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::OK });
        }
    };
    let mode = if cli.sequential { qladder::Mode::Sequential } else { qladder::Mode::Parallel };
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Spectrum(args) => commands::spectrum(args, mode),
        Command::Dynamics(args) => commands::dynamics(args, mode),
        Command::Limits(args) => commands::limits(args),
        Command::Compare(args) => commands::compare(args, mode),
        Command::Validate(args) => commands::validate(args, mode),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("qladder: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
