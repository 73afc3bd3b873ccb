mod evaluate;
mod files;
mod inputs;
mod study;

use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

/// Scores generated image sets against real data from precomputed
/// embeddings and class probabilities.
#[derive(Debug, Parser)]
#[command(name = "geneval", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute metrics and render a comparison table.
    Compute(evaluate::ComputeArgs),
    /// Recompute metrics on seeded subsets of several sizes.
    Sweep(evaluate::SweepArgs),
    /// Check GEMB or CSV files and list every problem.
    Validate(files::ValidateArgs),
    /// Convert a numeric CSV into a GEMB file.
    Import(files::ImportArgs),
    /// Blinded real-versus-fake annotation studies.
    #[command(subcommand)]
    Study(study::StudyCommand),
}

/// A failure that is not the caller's fault; exits with status 1.
#[derive(Debug)]
pub struct Internal(pub String);

impl std::fmt::Display for Internal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Internal {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Internal>() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<geneval_core::Error>() {
            if matches!(e.root(), geneval_core::Error::NoConvergence { .. }) {
                return 1;
            }
        }
    }
    2
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Compute(args) => evaluate::compute(args),
        Command::Sweep(args) => evaluate::run_sweep(args),
        Command::Validate(args) => files::validate(args),
        Command::Import(args) => files::import(args),
        Command::Study(cmd) => study::run(cmd),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
