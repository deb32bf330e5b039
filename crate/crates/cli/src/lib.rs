//! Command-line driver: parses a JSON run configuration, dispatches to the
//! solver modules and writes CSV tables, JSON summaries and field snapshots
//! into an output directory.
//!
//! Exit status is 0 when every property check passed, 2 when a check
//! failed and 1 on any error (with `error.json` in the output directory).

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

pub use config::{parse_config, Command, RunConfig};
pub use error::CliError;
pub use output::OutDir;

pub const DEFAULT_OUT: &str = "nsmx-out";

#[derive(Debug, Parser)]
#[command(name = "nsmx", version, about = "Navier-Stokes-Maxwell periodic solver and estimate checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `out` in the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed (overrides `seed` in the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, env = "NSMX_THREADS")]
    pub threads: Option<usize>,
}

/// Outcome of a completed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Passed,
    Failed,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Passed => 0,
            Status::Failed => 2,
        }
    }
}

/// Resolves the configuration of `cli`: file or defaults, then the
/// command-line overrides.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            parse_config(&text, Some(cli.command))?
        }
        None => RunConfig::default_for(cli.command),
    };
    if let Some(seed) = cli.seed {
        cfg.set_seed(seed);
    }
    let out = cli.out.clone().or_else(|| cfg.out().cloned()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    cfg.set_out(out);
    cfg.validate()?;
    Ok(cfg)
}

/// Writes the resolved config echo and runs the command.
pub fn execute(cfg: &RunConfig) -> Result<Status, CliError> {
    let out = OutDir::create(cfg.out().cloned().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)))?;
    out.write_raw_json("resolved_config.json", cfg)?;
    let passed = match cfg {
        RunConfig::Periodic(c) => commands::periodic::run(c, &out)?,
        RunConfig::Evolve(c) => commands::evolve::run(c, &out)?,
        RunConfig::Stability(c) => commands::stability::run(c, &out)?,
        RunConfig::Verify(c) => commands::verify::run(c, &out)?,
        RunConfig::Constants(c) => commands::constants::run(c, &out)?,
        RunConfig::SpectralReport(c) => commands::spectral::run(c, &out)?,
    };
    Ok(if passed { Status::Passed } else { Status::Failed })
}

fn init_threads(n: Option<usize>) -> Result<(), CliError> {
    match n {
        Some(0) => Err(CliError::Threads("thread count must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Threads(e.to_string())),
        None => Ok(()),
    }
}

fn report_error(cli: &Cli, err: &CliError) {
    eprintln!("error: {err}");
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    if let Ok(out) = OutDir::create(dir) {
        if let Err(e) = out.write_raw_json("error.json", &err.report()) {
            eprintln!("error: could not write error report: {e}");
        }
    }
}

pub fn run(cli: Cli) -> ExitCode {
    let result = init_threads(cli.threads).and_then(|_| resolve(&cli)).and_then(|cfg| execute(&cfg));
    match result {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            report_error(&cli, &e);
            ExitCode::from(1)
        }
    }
}
