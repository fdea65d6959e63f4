mod commands;
mod config;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Exit status categories.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("check failed: {0}")]
    Assertion(String),
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error(transparent)]
    Lab(#[from] qma_lab::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Assertion(_) => 1,
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Lab(e) => match e {
                qma_lab::Error::NonConvergence { .. } => 3,
                qma_lab::Error::InvalidParameter(_)
                | qma_lab::Error::InvalidGrid(_)
                | qma_lab::Error::DynamicRange { .. }
                | qma_lab::Error::ZeroDimension
                | qma_lab::Error::Io(_)
                | qma_lab::Error::Format(_) => 2,
                _ => 1,
            },
        }
    }
}

#[derive(Parser)]
#[command(name = "qma-lab", version, about = "Quaternionic Monge-Ampere numerical laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Randomized determinant comparisons and operator structural checks.
    VerifyInequalities {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Solve one instance on the torus and write the solution grid and metadata.
    Solve {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Sweep a right-hand-side family and record -inf phi (CSV and SVG).
    Probe {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Measure the auxiliary-equation claim constant over (s, k) (CSV).
    GpClaim {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the built-in example checks.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::VerifyInequalities { n, trials, seed } => commands::verify_inequalities(n, trials, seed),
        Command::Solve { config } => commands::solve(config.as_deref()),
        Command::Probe { config } => commands::probe(config.as_deref()),
        Command::GpClaim { config } => commands::gp_claim(config.as_deref()),
        Command::Selftest => selftest::run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
