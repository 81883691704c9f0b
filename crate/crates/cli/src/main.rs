mod angle;
mod config;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CliError, RunArgs};
use report::{EigArgs, EstimateArgs, ReduceArgs, ScanArgs};

#[derive(Debug, Parser)]
#[command(name = "pds-vqs", version, about = "PDS(K) variational quantum solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize one start and write the trajectory CSV
    Run(RunArgs),
    /// Optimize a grid of starts and sample the energy surface
    Scan(ScanArgs),
    /// Unique Pauli strings and measurement estimates for H^n
    Reduce(ReduceArgs),
    /// Measurement count for one operator at precision epsilon
    Estimate(EstimateArgs),
    /// Exact spectrum by dense diagonalization
    Eig(EigArgs),
}

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => report::run(args),
        Command::Scan(args) => report::scan(args),
        Command::Reduce(args) => report::reduce(args),
        Command::Estimate(args) => report::estimate(args),
        Command::Eig(args) => report::eig(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Solver(inner) if inner.is_numerical() => ExitCode::from(EXIT_NUMERICAL),
                _ => ExitCode::from(EXIT_USAGE),
            }
        }
    }
}
