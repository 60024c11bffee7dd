//! Command-line driver. Reads a TOML run configuration and writes plain
//! CSV and TOML files; see `docs/csv_schema.md` for the column layouts.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};

pub use commands::Outcome;
pub use config::RunConfig;

#[derive(Debug, Clone, Parser)]
#[command(name = "nlhk", version, about = "Heat-kernel envelopes for non-local Schrödinger operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output` in the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed; overrides `seed` in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; the results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check the structural conditions; fails on the first hard failure.
    Check,
    /// Regime, thresholds and constants.
    Classify,
    /// Sweep the envelopes over the configured (t, x, y) grid.
    Bounds,
    /// Compare the envelopes with the spectral oracle.
    Verify,
    /// Monte Carlo estimate of U_t 1.
    Mc,
    /// Run check, classify, bounds and verify and summarize.
    Report,
}

/// Run `command` with an already loaded configuration.
pub fn run_with(cfg: &RunConfig, command: Command, out: Option<PathBuf>, seed: Option<u64>, threads: Option<usize>) -> anyhow::Result<Outcome> {
    let out = out.unwrap_or_else(|| cfg.output.clone());
    let seed = seed.unwrap_or(cfg.seed);
    // Reports are TOML, whose integers are signed.
    if i64::try_from(seed).is_err() {
        anyhow::bail!("seed {seed} does not fit a signed 64-bit integer");
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("starting the thread pool")?;
    pool.install(|| match command {
        Command::Check => commands::cmd_check(cfg, &out),
        Command::Classify => commands::cmd_classify(cfg, &out),
        Command::Bounds => commands::cmd_bounds(cfg, &out),
        Command::Verify => commands::cmd_verify(cfg, &out, seed),
        Command::Mc => commands::cmd_mc(cfg, &out, seed),
        Command::Report => commands::cmd_report(cfg, &out, seed),
    })
}

pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let path = cli.config.as_ref().context("--config PATH is required")?;
    let cfg = RunConfig::load(path)?;
    run_with(&cfg, cli.command, cli.out.clone(), cli.seed, cli.threads)
}
