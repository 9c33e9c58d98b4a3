use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use qcomm_cli::acceptance::Fault;
use qcomm_cli::commands::{cmd_instance, cmd_run, cmd_sweep, cmd_verify, parse_grid, verify_report};
use qcomm_cli::config::{Overrides, Settings};
use qcomm_cli::report::rows_to_csv;
use qcomm_cli::CliError;

#[derive(Parser)]
#[command(name = "qcomm", version, about = "Distributed quantum linear-algebra protocol experiments")]
struct Cli {
    /// TOML file with defaults; keys are the flag names without dashes.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file; prints it unless --out is given.
    Instance { kind: String },
    /// Run --protocol on an instance file and append a ledger row to --out.
    Run { instance: PathBuf },
    /// Run --protocol over a parameter grid of generated instances.
    Sweep {
        kind: String,
        /// Axis as flag-name=v1,v2,... ; repeat for a cross product.
        #[arg(long = "grid")]
        grid: Vec<String>,
        /// Write an SVG of the ledger against the first axis.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Run acceptance checks: all, or comma-separated ids or names.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        /// Deliberate defect to demonstrate a failing check.
        #[arg(long, default_value = "none")]
        inject: String,
    },
}

fn settings(cli: &Cli) -> Result<Settings, CliError> {
    let file = match &cli.config {
        Some(path) => Overrides::from_file(path)?,
        None => Overrides::default(),
    };
    Settings::resolve(cli.flags.clone().over(file))
}

/// Returns whether every run or check succeeded.
fn execute(cli: Cli) -> Result<bool, CliError> {
    let s = settings(&cli)?;
    match &cli.command {
        Command::Instance { kind } => {
            let text = cmd_instance(kind, &s)?;
            if s.out.is_none() {
                print!("{text}");
            }
            Ok(true)
        }
        Command::Run { instance } => {
            let row = cmd_run(instance, &s)?;
            if s.out.is_none() {
                print!("{}", rows_to_csv(std::slice::from_ref(&row))?);
            }
            Ok(!row.failed)
        }
        Command::Sweep { kind, grid, plot } => {
            let axes = parse_grid(grid)?;
            let rows = cmd_sweep(kind, &axes, &s, plot.as_deref())?;
            if s.out.is_none() {
                print!("{}", rows_to_csv(&rows)?);
            }
            Ok(rows.iter().all(|r| !r.failed))
        }
        Command::Verify { suite, inject } => {
            let fault: Fault = inject.parse()?;
            let checks = cmd_verify(suite, fault)?;
            print!("{}", verify_report(&checks));
            Ok(checks.iter().all(|c| c.passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
