use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kerrbeam::app::{self, Command};
use kerrbeam::config::RunConfig;

#[derive(Parser)]
#[command(name = "kerrbeam", version, about = "Kerr squeezing of atom-laser beams")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Single-mode variance traces for each configured (N, χ) curve.
    SingleMode(Flags),
    /// Stochastic ensemble of the 1D atom laser with quadrature analysis.
    Twa(Flags),
    /// Quadrature analysis of field snapshots already in the output directory.
    Analyze(Flags),
    /// Falling-beam density scan and squeezing estimate.
    Beam3d(Flags),
    /// Intensity noise of two interfering Kerr beams.
    TwoBeam(Flags),
    /// Time-step and grid halving report.
    Convergence(Flags),
}

#[derive(clap::Args)]
struct Flags {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `ensemble.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// `section.key=value` override, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match cli.command {
        Cmd::SingleMode(f) => (Command::SingleMode, f),
        Cmd::Twa(f) => (Command::Twa, f),
        Cmd::Analyze(f) => (Command::Analyze, f),
        Cmd::Beam3d(f) => (Command::Beam3d, f),
        Cmd::TwoBeam(f) => (Command::TwoBeam, f),
        Cmd::Convergence(f) => (Command::Convergence, f),
    };
    match run(command, flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command, flags: Flags) -> Result<(), Box<dyn std::error::Error>> {
    if let Some(n) = flags.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let mut overrides = flags.set;
    if let Some(seed) = flags.seed {
        overrides.push(format!("ensemble.seed={seed}"));
    }
    let cfg = match &flags.config {
        Some(path) => RunConfig::load(path, &overrides)?,
        None => RunConfig::parse("", &overrides)?,
    };
    let files = app::run(command, &cfg, &flags.out)?;
    eprintln!("wrote {} files and manifest.txt to {}", files.len(), flags.out.display());
    Ok(())
}
