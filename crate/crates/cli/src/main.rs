mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Outcome;

/// Lexicographic maxima by progressive filling and exponential-loss
/// minimization, with the stability and convergence experiments.
#[derive(Parser, Debug)]
#[command(name = "lexopt", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Override a config entry, e.g. `--set solver.eps=0.1`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Seed; beats LEXOPT_SEED, which beats the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output CSV file (a directory for `reproduce`).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the lexmax and its sorted view.
    Lexmax,
    /// Run progressive filling and write its per-round trace.
    Fill,
    /// Run Frank-Wolfe or multiplicative weights on a matrix.
    Solve,
    /// Largest distortion among possible outputs for each ε.
    Stability,
    /// Distortion of the loss minimizer for each c.
    Converge,
    /// Run the acceptance criteria and write one CSV each plus a summary.
    Reproduce {
        /// Run a single criterion by name.
        #[arg(long)]
        only: Option<String>,
    },
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let mut cfg = config::load(cli.config.as_deref(), &cli.overrides)?;
    let seed = config::resolve_seed(cli.seed, cfg.seed)?;
    let out_dir = match &cli.command {
        Command::Reproduce { .. } => cli.output.clone(),
        _ => None,
    };
    if cli.output.is_some() && out_dir.is_none() {
        cfg.output = cli.output;
    }
    match &cli.command {
        Command::Lexmax => commands::lexmax(&cfg, seed),
        Command::Fill => commands::fill(&cfg, seed),
        Command::Solve => commands::solve(&cfg, seed),
        Command::Stability => commands::stability(&cfg, seed),
        Command::Converge => commands::converge(&cfg, seed),
        Command::Reproduce { only } => commands::reproduce(&cfg, seed, only.as_deref(), out_dir),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::CriteriaFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
