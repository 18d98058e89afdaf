mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use env_logger::Env;

use crate::output::Format;

/// Travelling waves of u_t = (u^{m-1} u_x)_x + u^p - u^q.
#[derive(Debug, Parser)]
#[command(name = "kppwaves", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir` of the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for per-speed work.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Canonical form, regime, critical speed and equilibria for each speed.
    Analyze,
    /// Shoot for the connection at each speed and write trajectories and profiles.
    Shoot,
    /// Advect the profiles written by `shoot` with the PDE solver.
    Pde,
    /// Compare predicted and observed wave classes over a grid of speeds.
    Sweep,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(Env::new().filter_or("KPPWAVES_LOG", "warn")).init();
    let cli = Cli::parse();
    let settings = commands::Settings {
        config: cli.config,
        out: cli.out,
        jobs: cli.jobs,
        format: cli.format,
    };
    match commands::run(cli.command, &settings) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
