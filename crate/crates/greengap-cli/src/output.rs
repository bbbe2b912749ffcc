//! File writers. All outputs are UTF-8; CSV uses `.` as the decimal
//! separator and no thousands grouping (Rust's shortest round-trip
//! float formatting), so reruns are byte-identical.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use greengap::audit::DatasetSummary;
use greengap::distributions::MomentDiagnostics;
use greengap::engine::{HistogramBin, LevelTag, SimulationResult};
use greengap::policy::{PolicySweepRow, ShiftPoint};
use greengap::sensitivity::SweepRow;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    ensure_parent(path)?;
    let mut bytes = serde_json::to_vec_pretty(value)
        .with_context(|| format!("serializing {}", path.display()))?;
    bytes.push(b'\n');
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating directory {}", parent.display()))?;
        }
    }
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    ensure_parent(path)?;
    csv::Writer::from_path(path).with_context(|| format!("opening {} for writing", path.display()))
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

/// Per-column summary table of the scaled audit dataset.
pub fn write_summary_csv(path: &Path, summary: &DatasetSummary) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "column", "mean", "median", "min", "max", "std", "skewness", "kurtosis",
    ])?;
    let mut row = |name: &str, d: &MomentDiagnostics| -> Result<()> {
        w.write_record([
            name.to_string(),
            fmt(d.mean),
            fmt(d.median),
            fmt(d.min),
            fmt(d.max),
            fmt(d.std),
            fmt(d.skewness),
            fmt(d.kurtosis),
        ])?;
        Ok(())
    };
    row("scaled_cost", &summary.scaled_cost)?;
    row("scaled_kwh", &summary.scaled_kwh)?;
    row("price", &summary.price)?;
    row("payback_years", &summary.payback_years)?;
    w.flush()?;
    Ok(())
}

/// Per-firm decision values for external plotting.
pub fn write_values_csv(path: &Path, results: &[SimulationResult]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["level", "firm", "value", "adopt"])?;
    for result in results {
        let Some(values) = &result.values else {
            continue;
        };
        for (firm, value) in values.iter().enumerate() {
            w.write_record([
                result.level_tag.to_string(),
                firm.to_string(),
                fmt(*value),
                u8::from(*value > 0.0).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_histogram_csv(
    path: &Path,
    histograms: &[(LevelTag, Vec<HistogramBin>)],
) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["level", "bin_lower", "bin_upper", "count"])?;
    for (level, bins) in histograms {
        for bin in bins {
            w.write_record([
                level.to_string(),
                fmt(bin.lower),
                fmt(bin.upper),
                bin.count.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_policy_csv(path: &Path, rows: &[PolicySweepRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "policy_kind",
        "rate",
        "level",
        "baseline_rate",
        "policy_rate",
        "delta_pp",
        "delta_mean_value",
        "avg_transfer",
    ])?;
    for row in rows {
        w.write_record([
            row.policy_kind.to_string(),
            fmt(row.rate),
            row.level.to_string(),
            fmt(row.baseline_rate),
            fmt(row.policy_rate),
            fmt(row.delta_pp),
            fmt(row.delta_mean_value),
            fmt(row.avg_transfer),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sensitivity_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["parameter", "value", "level", "rate"])?;
    for row in rows {
        w.write_record([
            row.parameter.to_string(),
            fmt(row.value),
            row.level.to_string(),
            fmt(row.implementation_rate),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_shift_csv(path: &Path, points: &[ShiftPoint]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["position", "rate"])?;
    for point in points {
        w.write_record([fmt(point.position), fmt(point.ensemble_rate)])?;
    }
    w.flush()?;
    Ok(())
}
