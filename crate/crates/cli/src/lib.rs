//! `fpa` command-line harness: optimizer runs, hit-probability estimates,
//! chain verification and Lévy step checks.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;

#[derive(Debug, Parser)]
#[command(
    name = "fpa",
    version,
    about = "Flower pollination experiments and chain verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize each problem and write convergence traces.
    Run(CommonArgs),
    /// Estimate the probability of reaching the ε-optimal region.
    Hitprob(CommonArgs),
    /// Build the lattice chain and run every convergence check.
    Verify(CommonArgs),
    /// Sample Lévy steps and check the tail exponent.
    LevyCheck(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Problem name; repeat or separate with commas.
    #[arg(long = "problem")]
    pub problems: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output formats, e.g. `csv,json`.
    #[arg(long)]
    pub format: Option<String>,
    /// Any configuration key, as `key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl CommonArgs {
    /// Config file first, then `--set` overrides, then the dedicated flags.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        for o in &self.overrides {
            config.apply_override(o)?;
        }
        if !self.problems.is_empty() {
            config.set("problems", &self.problems.join(","))?;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(out) = &self.out {
            config.out = out.clone();
        }
        if let Some(format) = &self.format {
            config.set("formats", format)?;
        }
        Ok(config)
    }
}

/// Runs a parsed command line. Exit status 0 means success, 1 a failed
/// check, 2 an invalid configuration or runtime error.
pub fn execute(cli: Cli) -> ExitCode {
    let (args, command): (
        &CommonArgs,
        fn(&ExperimentConfig) -> Result<commands::Outcome>,
    ) = match &cli.command {
        Command::Run(a) => (a, commands::cmd_run),
        Command::Hitprob(a) => (a, commands::cmd_hitprob),
        Command::Verify(a) => (a, commands::cmd_verify),
        Command::LevyCheck(a) => (a, commands::cmd_levy_check),
    };
    match args.resolve().and_then(|c| command(&c)) {
        Ok(outcome) => {
            for path in &outcome.written {
                println!("wrote {}", path.display());
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
