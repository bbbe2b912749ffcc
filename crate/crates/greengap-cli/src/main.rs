//! Command-line front end: wires audit ingestion, simulation, policy
//! experiments and sensitivity analysis into reproducible, file-based
//! runs. Every command is a pure function of (config file, flags,
//! seed); reruns produce byte-identical primary outputs. A manifest is
//! written last, so its presence marks a completed run.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

mod commands;
mod manifest;
mod output;

use manifest::RunManifest;

#[derive(Parser)]
#[command(
    name = "greengap",
    version,
    about = "Monte Carlo simulator of green-technology adoption by heterogeneous firms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a calibration from an audit CSV.
    Fit(FitArgs),
    /// Simulate implementation rates and value statistics per level.
    Simulate(SimulateArgs),
    /// Sweep tax/subsidy rates or evaluate a matched policy pair.
    Policy(PolicyArgs),
    /// One-at-a-time parameter sweeps or implicit-parameter inversion.
    Sensitivity(SensitivityArgs),
    /// Simulate a gradual shift of firms across decision levels.
    Shift(ShiftArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Audit records CSV (year,cost_usd,annual_kwh_saved,electricity_price_usd_per_kwh,implemented).
    #[arg(long)]
    input: PathBuf,
    /// Where to write the calibration JSON.
    #[arg(long)]
    out_config: PathBuf,
    /// Where to write the per-column summary CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Minimum plausible investment cost, USD.
    #[arg(long, default_value_t = greengap::audit::DEFAULT_MIN_COST)]
    min_cost: f64,
    /// Maximum plausible simple payback, years.
    #[arg(long, default_value_t = greengap::audit::DEFAULT_MAX_PAYBACK_YEARS)]
    max_payback: f64,
}

#[derive(Args)]
struct SimulateArgs {
    /// Calibration JSON.
    #[arg(long)]
    config: PathBuf,
    /// Where to write the results JSON.
    #[arg(long)]
    out: PathBuf,
    /// Levels to simulate (comma list of L0,L1,L2,L3,Ensemble).
    #[arg(long, value_delimiter = ',')]
    levels: Vec<String>,
    /// Override the configured trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write per-firm values to this CSV.
    #[arg(long)]
    values: Option<PathBuf>,
    /// Also write histograms of the retained values to this CSV.
    #[arg(long)]
    histogram: Option<PathBuf>,
    /// Histogram bin count.
    #[arg(long, default_value_t = 50)]
    bins: usize,
}

#[derive(Args)]
struct PolicyArgs {
    /// Calibration JSON.
    #[arg(long)]
    config: PathBuf,
    /// Where to write the sweep CSV.
    #[arg(long)]
    out: PathBuf,
    /// Also write the full impact table (with marginals) as JSON.
    #[arg(long)]
    impact_json: Option<PathBuf>,
    /// Tax-rate grid: comma list or start:stop:step.
    #[arg(long)]
    tax_grid: Option<String>,
    /// Subsidy-rate grid: comma list or start:stop:step.
    #[arg(long)]
    subsidy_grid: Option<String>,
    /// Evaluate the subsidy whose average transfer matches this tax rate.
    #[arg(long)]
    match_tax: Option<f64>,
    /// Levels to evaluate (default L1,L2,L3).
    #[arg(long, value_delimiter = ',')]
    levels: Vec<String>,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SensitivityArgs {
    /// Calibration JSON.
    #[arg(long)]
    config: PathBuf,
    /// Parameter to vary: price, delta_q, delta_c, b, r or gamma.
    #[arg(long)]
    parameter: String,
    /// Point-value grid: comma list or start:stop:step.
    #[arg(long)]
    grid: Option<String>,
    /// Invert for the parameter value that hits this implementation rate.
    #[arg(long)]
    invert: Option<f64>,
    /// Level for the inversion (default L1).
    #[arg(long)]
    level: Option<String>,
    /// Levels for grid sweeps (default L1,L2,L3).
    #[arg(long, value_delimiter = ',')]
    levels: Vec<String>,
    /// Where to write the sweep CSV or inversion JSON.
    #[arg(long)]
    out: PathBuf,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ShiftArgs {
    /// Calibration JSON.
    #[arg(long)]
    config: PathBuf,
    /// Number of evenly spaced positions along the shift path.
    #[arg(long, default_value_t = 21)]
    steps: usize,
    /// Where to write the shift CSV.
    #[arg(long)]
    out: PathBuf,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() {
    init_thread_pool();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

/// Caps the worker count from GREENGAP_THREADS (default: machine
/// parallelism).
fn init_thread_pool() {
    if let Ok(raw) = std::env::var("GREENGAP_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let outcome = match cli.command {
        Command::Fit(args) => commands::fit(args)?,
        Command::Simulate(args) => commands::simulate(args)?,
        Command::Policy(args) => commands::policy(args)?,
        Command::Sensitivity(args) => commands::sensitivity(args)?,
        Command::Shift(args) => commands::shift(args)?,
    };

    let manifest_path = outcome.manifest_path();
    let manifest = RunManifest::new(
        outcome.command,
        outcome.config_path.clone(),
        outcome.seed,
        outcome.outputs.clone(),
    );
    manifest
        .write(&manifest_path)
        .context("writing run manifest")?;
    Ok(())
}

/// What a completed command hands back for the manifest.
pub struct RunOutcome {
    pub command: &'static str,
    pub config_path: Option<PathBuf>,
    pub seed: u64,
    /// Primary outputs, the first of which anchors the manifest path.
    pub outputs: Vec<PathBuf>,
}

impl RunOutcome {
    fn manifest_path(&self) -> PathBuf {
        let primary = self
            .outputs
            .first()
            .expect("commands write at least one output");
        let mut name = primary.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        primary.with_file_name(name)
    }
}
