use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use greengap::audit::{self, LiteratureSpecs};
use greengap::engine::{
    histogram, simulate_level_with_retention, CalibrationConfig, LevelTag, SimulationResult,
};
use greengap::grid::parse_grid;
use greengap::policy::{
    equivalent_subsidy_for_tax, policy_sweep, shift_sweep, EquivalentSubsidy, PolicySweepRow,
};
use greengap::sensitivity::{implicit_parameter, run_sweep, SweepParameter, SweepSpec};

use crate::output;
use crate::{FitArgs, PolicyArgs, RunOutcome, SensitivityArgs, ShiftArgs, SimulateArgs};

fn load_config(path: &Path, seed: Option<u64>) -> Result<CalibrationConfig> {
    let raw = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut config: CalibrationConfig =
        serde_json::from_str(&raw).with_context(|| format!("parsing config {}", path.display()))?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    config
        .validate()
        .with_context(|| format!("validating config {}", path.display()))?;
    Ok(config)
}

fn parse_levels(raw: &[String], default: &[LevelTag]) -> Result<Vec<LevelTag>> {
    if raw.is_empty() {
        return Ok(default.to_vec());
    }
    raw.iter().map(|s| Ok(s.parse::<LevelTag>()?)).collect()
}

pub fn fit(args: FitArgs) -> Result<RunOutcome> {
    let report = audit::load_csv(&args.input)
        .with_context(|| format!("loading {}", args.input.display()))?;
    if !report.row_errors.is_empty() {
        eprintln!("{}", report.error_report());
    }
    let records = report.require_clean(&args.input.display().to_string())?;
    if records.is_empty() {
        bail!("{} contains no data rows", args.input.display());
    }

    let kept = audit::filter_outliers(&records, args.min_cost, args.max_payback);
    println!(
        "{} records, {} kept after outlier filtering",
        records.len(),
        kept.len()
    );
    let scaled = audit::scale_to_median(&kept).context("scaling to the median project")?;
    let config = audit::calibrate(&scaled, &LiteratureSpecs::default())?;

    output::write_json(&args.out_config, &config)?;
    let summary_path = args.summary.unwrap_or_else(|| {
        let mut name = args
            .out_config
            .file_stem()
            .unwrap_or_default()
            .to_os_string();
        name.push(".summary.csv");
        args.out_config.with_file_name(name)
    });
    output::write_summary_csv(&summary_path, &scaled.summary)?;

    // validate the primary output by reading it back
    let reparsed = load_config(&args.out_config, None)?;
    anyhow::ensure!(reparsed == config, "config failed round-trip validation");

    println!("observed implementation rate: {:.4}", scaled.observed_rate);
    println!("calibration written to {}", args.out_config.display());
    Ok(RunOutcome {
        command: "fit",
        config_path: None,
        seed: config.seed,
        outputs: vec![args.out_config, summary_path],
    })
}

#[derive(Serialize)]
struct ResultsDoc {
    trials: usize,
    seed: u64,
    results: Vec<SimulationResult>,
}

pub fn simulate(args: SimulateArgs) -> Result<RunOutcome> {
    let mut config = load_config(&args.config, args.seed)?;
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    let levels = parse_levels(&args.levels, &LevelTag::ALL)?;
    let retain = args.values.is_some() || args.histogram.is_some() || config.trials <= 1_000_000;

    let mut results = Vec::with_capacity(levels.len());
    for &level in &levels {
        let result = simulate_level_with_retention(&config, level, retain)?;
        println!(
            "{}: rate {:.4}, mean {:.2}, std {:.2}",
            level, result.implementation_rate, result.stats.mean, result.stats.std
        );
        results.push(result);
    }

    let mut outputs = vec![args.out.clone()];
    if let Some(values_path) = &args.values {
        output::write_values_csv(values_path, &results)?;
        outputs.push(values_path.clone());
    }
    if let Some(histogram_path) = &args.histogram {
        let mut histograms = Vec::new();
        for result in &results {
            histograms.push((result.level_tag, histogram(result, args.bins)?));
        }
        output::write_histogram_csv(histogram_path, &histograms)?;
        outputs.push(histogram_path.clone());
    }

    let doc = ResultsDoc {
        trials: config.trials,
        seed: config.seed,
        results,
    };
    output::write_json(&args.out, &doc)?;
    let _: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&args.out)?).context("results failed validation")?;

    Ok(RunOutcome {
        command: "simulate",
        config_path: Some(args.config),
        seed: config.seed,
        outputs,
    })
}

#[derive(Serialize)]
struct PolicyDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    matched: Option<EquivalentSubsidy>,
    rows: Vec<PolicySweepRow>,
}

pub fn policy(args: PolicyArgs) -> Result<RunOutcome> {
    if args.tax_grid.is_none() && args.subsidy_grid.is_none() && args.match_tax.is_none() {
        bail!("pass at least one of --tax-grid, --subsidy-grid or --match-tax");
    }
    let config = load_config(&args.config, args.seed)?;
    let levels = parse_levels(&args.levels, &LevelTag::HETEROGENEOUS)?;

    let mut tax_grid = match &args.tax_grid {
        Some(expr) => parse_grid(expr)?,
        None => Vec::new(),
    };
    let mut subsidy_grid = match &args.subsidy_grid {
        Some(expr) => parse_grid(expr)?,
        None => Vec::new(),
    };

    let mut matched = None;
    if let Some(tax_rate) = args.match_tax {
        let eq = equivalent_subsidy_for_tax(&config, tax_rate)?;
        println!(
            "equivalent subsidy for a {:.4} tax: {:.4}",
            eq.tax_rate, eq.subsidy_rate
        );
        if eq.saturated {
            eprintln!("warning: matching transfer requires a subsidy above 100%; clipped to 1.0");
        }
        tax_grid.push(tax_rate);
        subsidy_grid.push(eq.subsidy_rate);
        matched = Some(eq);
    }

    let rows = policy_sweep(&config, &tax_grid, &subsidy_grid, &levels)?;
    output::write_policy_csv(&args.out, &rows)?;
    println!(
        "{} sweep rows written to {}",
        rows.len(),
        args.out.display()
    );

    let mut outputs = vec![args.out.clone()];
    if let Some(impact_path) = &args.impact_json {
        output::write_json(impact_path, &PolicyDoc { matched, rows })?;
        outputs.push(impact_path.clone());
    }

    Ok(RunOutcome {
        command: "policy",
        config_path: Some(args.config),
        seed: config.seed,
        outputs,
    })
}

pub fn sensitivity(args: SensitivityArgs) -> Result<RunOutcome> {
    let config = load_config(&args.config, args.seed)?;
    let parameter: SweepParameter = args.parameter.parse()?;

    match (&args.grid, args.invert) {
        (Some(_), Some(_)) | (None, None) => {
            bail!("pass exactly one of --grid or --invert")
        }
        (Some(expr), None) => {
            let spec = SweepSpec {
                parameter,
                grid: parse_grid(expr)?,
                levels: parse_levels(&args.levels, &LevelTag::HETEROGENEOUS)?,
            };
            let rows = run_sweep(&config, &spec)?;
            output::write_sensitivity_csv(&args.out, &rows)?;
            println!(
                "{} sweep rows written to {}",
                rows.len(),
                args.out.display()
            );
        }
        (None, Some(target)) => {
            let level = match &args.level {
                Some(raw) => raw.parse::<LevelTag>()?,
                None => LevelTag::Optimizing,
            };
            let inversion = implicit_parameter(&config, parameter, target, level)?;
            println!(
                "implicit {} at {} for target rate {:.4}: {:.6} (achieved {:.4}, {} iterations)",
                parameter,
                level,
                target,
                inversion.solution,
                inversion.achieved_rate,
                inversion.iterations
            );
            output::write_json(&args.out, &inversion)?;
        }
    }

    Ok(RunOutcome {
        command: "sensitivity",
        config_path: Some(args.config),
        seed: config.seed,
        outputs: vec![args.out],
    })
}

pub fn shift(args: ShiftArgs) -> Result<RunOutcome> {
    let config = load_config(&args.config, args.seed)?;
    let points = shift_sweep(&config, args.steps)?;
    output::write_shift_csv(&args.out, &points)?;
    let first = points.first().expect("at least two steps");
    let last = points.last().expect("at least two steps");
    println!(
        "shift path: rate {:.4} at position {} up to {:.4} at position {}",
        first.ensemble_rate, first.position, last.ensemble_rate, last.position
    );

    Ok(RunOutcome {
        command: "shift",
        config_path: Some(args.config),
        seed: config.seed,
        outputs: vec![args.out],
    })
}
