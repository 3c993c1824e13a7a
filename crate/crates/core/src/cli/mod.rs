//! The `epr-ledger` command line: `run` simulates and writes a trial log plus
//! summary, `audit` prints the analytic ledger without simulating.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error.

pub mod config;
pub mod report;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::rng::RngPolicy;
use crate::sim::run_experiment;

pub use config::{parse_config, ConfigError, Overrides, RunConfig};
pub use report::{analytic_values, summarize, write_trial_log, SummaryReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_IO: u8 = 3;

pub const TRIAL_LOG_FILE: &str = "trials.jsonl";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Model(#[from] crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Model(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "epr-ledger",
    version,
    about = "EPR-Bohm pair simulator with per-observer information ledgers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate trials, write the trial log and summary.
    Run(RunArgs),
    /// Print the analytic information ledger and both pair audits.
    Audit,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct RunArgs {
    /// Flat key=value configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// entangled | independent | custom:PATH
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// x_source,x_alice,x_bob,x_charles,t1,t2
    #[arg(long, allow_hyphen_values = true)]
    pub geometry: Option<String>,
    /// Prior odds of entangled vs independent source.
    #[arg(long)]
    pub prior_odds: Option<f64>,
    /// Output directory for trials.jsonl and summary.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Omit the timestamp so reruns are byte-identical.
    #[arg(long)]
    pub no_timestamp: bool,
}

impl RunArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            source: self.source.clone(),
            trials: self.trials,
            seed: self.seed,
            geometry: self.geometry.clone(),
            prior_odds: self.prior_odds,
            out: self.out.clone(),
            no_timestamp: self.no_timestamp,
        }
    }

    pub fn load(&self) -> Result<RunConfig, CliError> {
        let overrides = self.overrides();
        match &self.config {
            None => Ok(parse_config(None, &overrides)?),
            Some(path) => {
                let origin = path.display().to_string();
                let text = fs::read_to_string(path).map_err(|e| ConfigError::Unreadable {
                    origin: origin.clone(),
                    message: e.to_string(),
                })?;
                Ok(parse_config(Some((&text, &origin)), &overrides)?)
            }
        }
    }
}

fn io_err(path: PathBuf) -> impl FnOnce(io::Error) -> CliError {
    move |source| CliError::Io { path, source }
}

/// Runs the experiment and writes `trials.jsonl` and `summary.json` to the
/// configured directory.
pub fn run(config: &RunConfig) -> Result<SummaryReport, CliError> {
    let records = run_experiment(
        &config.geometry,
        &config.source,
        &RngPolicy::new(config.master_seed),
        config.n_trials,
    )?;
    let timestamp = config.timestamp.then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let summary = summarize(config, &records, timestamp)?;

    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(io_err(dir.clone()))?;

    let log_path = dir.join(TRIAL_LOG_FILE);
    let log = File::create(&log_path).map_err(io_err(log_path.clone()))?;
    write_trial_log(BufWriter::new(log), &records).map_err(io_err(log_path))?;

    let summary_path = dir.join(SUMMARY_FILE);
    let mut body = serde_json::to_string_pretty(&summary).expect("summary serializes");
    body.push('\n');
    fs::write(&summary_path, body).map_err(io_err(summary_path))?;
    Ok(summary)
}

/// Entry point shared by the binary and tests. Returns the process exit code.
pub fn execute<O: Write, E: Write>(cli: Cli, stdout: &mut O, stderr: &mut E) -> u8 {
    let result = match cli.command {
        Command::Audit => analytic_values().map_err(CliError::from).map(|a| {
            let _ = write!(stdout, "{}", a.render());
        }),
        Command::Run(args) => args.load().and_then(|cfg| run(&cfg)).map(|summary| {
            let _ = writeln!(
                stdout,
                "{}",
                serde_json::to_string_pretty(&summary).expect("summary serializes")
            );
        }),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "epr-ledger: {e}");
            e.exit_code()
        }
    }
}
