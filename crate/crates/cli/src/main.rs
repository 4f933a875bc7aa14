//! `superres` — command-line driver for the spectral-estimation toolkit.
//!
//! Subcommands: `estimate` (single-shot support/amplitude recovery),
//! `verify-bounds` (the inequality suite), `sweep` (Monte-Carlo phase
//! transitions), `generate` (synthetic measurement CSVs).
//!
//! Exit codes: 0 success, 1 computation failure or violated bound,
//! 2 input/output error, 3 parameter error.

mod commands;
mod config;

use clap::{Parser, Subcommand, ValueEnum};
use config::FileConfig;
use std::path::PathBuf;
use std::process::ExitCode;
use superres_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    /// Reduced grids and trial counts, sized for minutes.
    Desk,
    /// The full 100-trial, 10-phase-draw protocol.
    Paper,
}

#[derive(Parser)]
#[command(
    name = "superres",
    version,
    about = "Super-resolution spectral estimation: ESPRIT, MUSIC, bounds, and phase-transition sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML config file with one section per command.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Scale profile.
    #[arg(long, global = true, value_enum, default_value_t = Profile::Desk)]
    profile: Profile,

    /// Worker threads (0 = all available cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Estimator override: esprit | music.
    #[arg(long, global = true)]
    estimator: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a support (and amplitudes) from a measurement CSV or a
    /// synthetic spec in the config file.
    Estimate {
        /// Input measurement CSV (`k,re,im`).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Number of atoms to recover.
        #[arg(long)]
        s: Option<usize>,
        /// ESPRIT window parameter (default floor(M/2)).
        #[arg(long)]
        l: Option<usize>,
    },
    /// Run the bound-verification suite and write bounds.csv.
    VerifyBounds,
    /// Run Monte-Carlo sweeps; write cells/curve/slopes CSVs and SVG plots.
    Sweep,
    /// Write a synthetic measurement CSV.
    Generate,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 2,
        Error::Parameter(_)
        | Error::Dimension(_)
        | Error::InvalidMeasure(_)
        | Error::ClumpsInvalid(_)
        | Error::ClumpsInfeasible(_)
        | Error::UncertaintyWindowTooShort { .. } => 3,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    if cli.threads > 0 {
        // A second configuration attempt (e.g. in tests) is harmless.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }

    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };

    std::fs::create_dir_all(&cli.out)
        .map_err(|e| Error::Io(format!("{}: {e}", cli.out.display())))?;

    match &cli.command {
        Command::Estimate { input, s, l } => commands::estimate::run(
            &cli,
            file.estimate.clone(),
            input.clone(),
            *s,
            *l,
        ),
        Command::VerifyBounds => commands::verify::run(&cli, file.verify_bounds.clone()),
        Command::Sweep => commands::sweep::run(&cli, file.sweep.clone()),
        Command::Generate => commands::generate::run(&cli, file.generate.clone()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
