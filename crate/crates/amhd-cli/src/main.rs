//! Config-driven workbench around the `amhd` library.
//!
//! Three subcommands: `list-seeds` prints the seed catalog, `run` executes a
//! pipeline config (seed, transforms, verification, exports), and `export`
//! executes the same config but skips verification. Exit codes follow the
//! verifier contract: 0 all stages pass, 1 tolerance breach, 2 config or
//! evaluation error.

mod config;
mod export;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pipeline::Overrides;

#[derive(Parser)]
#[command(name = "amhd", version, about = "Anisotropic plasma equilibrium workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List seed equilibria with their parameters and compatible transforms.
    ListSeeds,
    /// Execute a pipeline config: seed, transforms, verification, exports.
    Run(RunArgs),
    /// Execute a pipeline config and write its exports, skipping verification.
    Export(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Pipeline config file (TOML).
    config: PathBuf,
    /// Override the finite-difference step from the config.
    #[arg(long)]
    fd_step: Option<f64>,
    /// Override the verification sample count from the config.
    #[arg(long)]
    samples: Option<usize>,
    /// Override the finite-difference tolerance gate from the config.
    #[arg(long)]
    tol: Option<f64>,
    /// Directory for reports and exports.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            fd_step: self.fd_step,
            samples: self.samples,
            tol: self.tol,
            out_dir: self.out_dir.clone(),
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::ListSeeds => {
            pipeline::list_seeds();
            Ok(0)
        }
        Command::Run(args) => pipeline::run(&args.config, &args.overrides(), true),
        Command::Export(args) => pipeline::run(&args.config, &args.overrides(), false),
    }
}
