//! `codiff`: generate, label, train, solve and evaluate from one config.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Context;
use config::Config;
use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "codiff", version, about = "Diffusion heatmap solver for TSP and MIS")]
struct Cli {
    /// TOML pipeline config; every key is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for inputs and outputs given as relative paths.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Generate random instances.
    Gen,
    /// Attach reference labels to a dataset.
    Label,
    /// Train the graph denoiser on a labelled dataset.
    Train,
    /// Solve every instance of a dataset.
    Solve,
    /// Compare solution files against a baseline.
    Eval,
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    std::fs::create_dir_all(&cli.out).map_err(|source| CliError::Io { path: cli.out.clone(), source })?;
    let ctx = Context { config, out: cli.out };
    match cli.command {
        Command::Gen => commands::gen(&ctx),
        Command::Label => commands::label(&ctx),
        Command::Train => commands::train(&ctx),
        Command::Solve => commands::solve(&ctx),
        Command::Eval => commands::eval(&ctx),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
