//! Command-line front end for the P1 center model.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{Format, RunConfig};
pub use error::CliError;
pub use output::{Cell, OutputTable};

#[derive(Debug, Parser)]
#[command(name = "p1spin", version, about = "P1 center spin levels, hyperfine augmentation, DEER and Rabi tools")]
#[command(after_long_help = config::keys_help())]
pub struct Cli {
    /// TOML config file with one section per command.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Override one key, e.g. --set sweep.b_max=200 (repeatable).
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE", global = true)]
    pub overrides: Vec<String>,

    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Shorthand for --set output.format=...
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    pub format: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Labeled energy levels over the sweep grid.
    Levels,
    /// DEER stick lines and broadened spectrum at deer.field.
    Deer,
    /// Augmentation factor of alpha.transition over the sweep grid.
    Alpha,
    /// Synthetic nuclear Rabi trace.
    RabiSim,
    /// Fit a damped sinusoid to a `time_us,signal` trace.
    RabiFit {
        trace: PathBuf,
    },
}

impl Cli {
    pub fn resolve_config(&self) -> Result<RunConfig, CliError> {
        let text = match &self.config {
            Some(p) => Some(
                std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", p.display())))?,
            ),
            None => None,
        };
        let mut overrides = self.overrides.clone();
        if let Some(f) = &self.format {
            overrides.push(format!("output.format=\"{f}\""));
        }
        RunConfig::load(text.as_deref(), &overrides)
    }
}

pub fn build_table(cli: &Cli, cfg: &RunConfig) -> Result<OutputTable, CliError> {
    match &cli.command {
        Command::Levels => commands::cmd_levels(cfg),
        Command::Deer => commands::cmd_deer(cfg),
        Command::Alpha => commands::cmd_alpha(cfg),
        Command::RabiSim => commands::cmd_rabi_sim(cfg),
        Command::RabiFit { trace } => commands::cmd_rabi_fit(cfg, trace),
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = cli.resolve_config()?;
    let t = build_table(cli, &cfg)?;
    match &cli.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            t.write(cfg.output.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            t.write(cfg.output.format, &mut w)?;
        }
    }
    Ok(())
}
