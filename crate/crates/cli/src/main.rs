//! `wk`: Wigner-Kirkwood expansions, partition functions and verification
//! suites from the command line.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 verification failure.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wigner_kirkwood::sampling::DEFAULT_SEED;
use wigner_kirkwood::verify::VerifyCase;

use config::{RunArgs, RunConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "wk", version, about = "Semiclassical expansion of the quantum partition function")]
struct Cli {
    /// Run a verification suite instead of a subcommand
    #[arg(long, value_name = "CASE", global = true)]
    verify: Option<VerifyCase>,
    /// Seed for sampled check points
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML file with run settings; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the correction polynomials W_0..W_K and a summary
    Expand(RunArgs),
    /// Tabulate Z_k(t) and their sum as CSV
    Partition(RunArgs),
    /// Export the oracle spectrum as JSON
    Spectrum(RunArgs),
    /// Momentum-representation report as JSON
    Moment(RunArgs),
    /// Run a named verification suite
    Verify {
        case: VerifyCase,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = cli.config.as_deref();
    if let Some(case) = cli.verify {
        let out = match &cli.command {
            Some(Command::Verify { out, .. }) => out.clone(),
            _ => None,
        };
        return commands::verify(case, cli.seed.unwrap_or(DEFAULT_SEED), out.as_deref());
    }
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match cli.command {
        None => Err(CliError::Config("no subcommand given (try --help)".into())),
        Some(Command::Verify { case, out }) => {
            commands::verify(case, seed, out.as_deref())
        }
        Some(Command::Expand(args)) => {
            let cfg = RunConfig::resolve(args, config)?;
            let summary = commands::expand(&cfg)?;
            print!("{summary}");
            Ok(())
        }
        Some(Command::Partition(args)) => commands::partition(&RunConfig::resolve(args, config)?),
        Some(Command::Spectrum(args)) => commands::spectrum(&RunConfig::resolve(args, config)?),
        Some(Command::Moment(args)) => commands::moment(&RunConfig::resolve(args, config)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
