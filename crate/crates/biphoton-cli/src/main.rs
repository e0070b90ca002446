//! Command-line front end: experiment manifests in, plot-ready CSV/JSON out.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use manifest::load_manifest;

/// Collective biphoton temporal waveform simulator for Doppler-broadened
/// cascade-type atomic ensembles.
#[derive(Parser)]
#[command(name = "biphoton", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML manifest path; omit to start from defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset name (Cs-6D5/2 or Cs-8S1/2); takes precedence over the
    /// manifest's preset key.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory (created if missing). Defaults to the working
    /// directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dotted-path manifest override, e.g. `drive.omega_c_mhz=3.0`.
    /// Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline: raw trace, jitter convolution, normalization,
    /// width report.
    Simulate(CommonArgs),
    /// Sweep the coupling wavelength and emit the g² surface.
    Sweep(CommonArgs),
    /// Amplitude/phase decomposition over velocity at fixed τ values.
    Decompose(CommonArgs),
    /// Print derived kinematic quantities for a configuration.
    Info(CommonArgs),
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("manifest is invalid:\n{}", .0.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    Schema(Vec<String>),
    #[error("{0}")]
    Convergence(biphoton::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Other(String),
}

impl From<biphoton::Error> for CliError {
    fn from(e: biphoton::Error) -> Self {
        match e {
            biphoton::Error::ConvergenceFailure { .. } => CliError::Convergence(e),
            // anything else slipping past manifest validation is a bad input
            other => CliError::Schema(vec![other.to_string()]),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Io(_) | CliError::Other(_) => 1,
        }
    }
}

fn run(args: &CommonArgs, command: &Command) -> Result<(), CliError> {
    let text = match &args.config {
        Some(path) => Some(std::fs::read_to_string(path)?),
        None => None,
    };
    let manifest = load_manifest(text.as_deref(), args.preset.as_deref(), &args.overrides)?;
    let resolved = manifest.resolve()?;
    let out_dir = commands::out_dir_of(&args.out);
    match command {
        Command::Simulate(_) => commands::cmd_simulate(&resolved, &out_dir),
        Command::Sweep(_) => commands::cmd_sweep(&resolved, &out_dir),
        Command::Decompose(_) => commands::cmd_decompose(&resolved, &out_dir),
        Command::Info(_) => commands::cmd_info(&resolved, &mut std::io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::Simulate(a) | Command::Sweep(a) | Command::Decompose(a) | Command::Info(a) => a,
    };
    match run(args, &cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
