//! Ingestion of raw energy-audit project records: CSV parsing with a
//! line-numbered error report, outlier filtering, median scaling and
//! distribution calibration.
//!
//! Input CSV schema (UTF-8, comma-separated, header required):
//!
//! ```text
//! year,cost_usd,annual_kwh_saved,electricity_price_usd_per_kwh,implemented
//! ```
//!
//! with `implemented` one of `0`, `1`, `true`, `false`.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::decision::{BehaviouralConstants, EnsembleWeights};
use crate::distributions::{fit_weibull_mle, median_of, moment_diagnostics, MomentDiagnostics};
use crate::engine::CalibrationConfig;
use crate::{DistributionSpec, Error, Result};

/// Required CSV columns, in schema order.
pub const REQUIRED_COLUMNS: [&str; 5] = [
    "year",
    "cost_usd",
    "annual_kwh_saved",
    "electricity_price_usd_per_kwh",
    "implemented",
];

/// One audit project recommendation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub year: i32,
    /// Estimated investment cost, USD.
    pub cost: f64,
    /// Estimated annual electricity saved, kWh/year.
    pub annual_kwh_saved: f64,
    /// Electricity price, USD/kWh.
    pub price: f64,
    /// Final implementation status.
    pub implemented: bool,
}

impl AuditRecord {
    /// Simple payback in years: cost over annual savings value.
    pub fn payback_years(&self) -> f64 {
        self.cost / (self.price * self.annual_kwh_saved)
    }
}

/// A malformed CSV row, reported rather than silently dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

/// Outcome of parsing an audit CSV: well-formed records plus the
/// errors for every malformed row.
#[derive(Debug, Clone, Default)]
pub struct LoadReport {
    pub records: Vec<AuditRecord>,
    pub row_errors: Vec<RowError>,
}

impl LoadReport {
    /// Line-numbered text report of the malformed rows.
    pub fn error_report(&self) -> String {
        self.row_errors
            .iter()
            .map(|e| format!("line {}: {}", e.line, e.message))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Converts collected row errors into a hard error for pipelines
    /// that require a fully clean file.
    pub fn require_clean(self, path: &str) -> Result<Vec<AuditRecord>> {
        if let Some(first) = self.row_errors.first() {
            return Err(Error::Rows {
                path: path.to_string(),
                count: self.row_errors.len(),
                first_line: first.line,
                first_message: first.message.clone(),
            });
        }
        Ok(self.records)
    }
}

/// Parses audit records from a CSV file.
pub fn load_csv<P: AsRef<Path>>(path: P) -> Result<LoadReport> {
    let file = std::fs::File::open(path)?;
    parse_reader(file)
}

/// Parses audit records from any reader. Missing required columns are a
/// schema error; unparsable rows are collected into the report with
/// their line numbers.
pub fn parse_reader<R: Read>(reader: R) -> Result<LoadReport> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);

    let headers = csv_reader
        .headers()
        .map_err(|e| Error::Schema(format!("cannot read header row: {e}")))?
        .clone();
    let mut column_index = [0usize; 5];
    for (slot, name) in column_index.iter_mut().zip(REQUIRED_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("missing required column '{name}'")))?;
    }
    let [year_col, cost_col, kwh_col, price_col, implemented_col] = column_index;

    let mut report = LoadReport::default();
    for row in csv_reader.records() {
        let row = match row {
            Ok(row) => row,
            Err(e) => {
                let line = match e.position() {
                    Some(pos) => pos.line(),
                    None => 0,
                };
                report.row_errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        match parse_record(
            &row,
            year_col,
            cost_col,
            kwh_col,
            price_col,
            implemented_col,
        ) {
            Ok(record) => report.records.push(record),
            Err(message) => report.row_errors.push(RowError { line, message }),
        }
    }
    Ok(report)
}

fn parse_record(
    row: &csv::StringRecord,
    year_col: usize,
    cost_col: usize,
    kwh_col: usize,
    price_col: usize,
    implemented_col: usize,
) -> std::result::Result<AuditRecord, String> {
    let field = |col: usize, name: &str| {
        row.get(col)
            .ok_or_else(|| format!("missing field '{name}'"))
    };
    let numeric = |col: usize, name: &str| -> std::result::Result<f64, String> {
        let raw = field(col, name)?;
        raw.parse::<f64>()
            .map_err(|_| format!("unparseable numeric '{raw}' in '{name}'"))
    };

    let year = field(year_col, "year")?
        .parse::<i32>()
        .map_err(|_| format!("unparseable year '{}'", row.get(year_col).unwrap_or("")))?;
    let cost = numeric(cost_col, "cost_usd")?;
    let annual_kwh_saved = numeric(kwh_col, "annual_kwh_saved")?;
    let price = numeric(price_col, "electricity_price_usd_per_kwh")?;
    let implemented = match field(implemented_col, "implemented")?
        .to_ascii_lowercase()
        .as_str()
    {
        "1" | "true" => true,
        "0" | "false" => false,
        other => return Err(format!("implemented must be 0/1/true/false, got '{other}'")),
    };

    if !cost.is_finite() || cost < 0.0 {
        return Err(format!("cost must be nonnegative, got {cost}"));
    }
    if !annual_kwh_saved.is_finite() || annual_kwh_saved <= 0.0 {
        return Err(format!(
            "annual_kwh_saved must be positive, got {annual_kwh_saved}"
        ));
    }
    if !price.is_finite() || price <= 0.0 {
        return Err(format!("price must be positive, got {price}"));
    }

    Ok(AuditRecord {
        year,
        cost,
        annual_kwh_saved,
        price,
        implemented,
    })
}

/// Drops records with near-zero reported costs or implausibly long
/// simple paybacks, preserving input order.
pub fn filter_outliers(
    records: &[AuditRecord],
    min_cost: f64,
    max_payback_years: f64,
) -> Vec<AuditRecord> {
    records
        .iter()
        .filter(|r| r.cost >= min_cost && r.payback_years() <= max_payback_years)
        .copied()
        .collect()
}

/// Default cost floor: removes the zero-cost rows present in raw data.
pub const DEFAULT_MIN_COST: f64 = 1.0;

/// Default payback ceiling: one motor lifetime.
pub const DEFAULT_MAX_PAYBACK_YEARS: f64 = 20.0;

/// Per-column summary statistics of a scaled dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub scaled_cost: MomentDiagnostics,
    pub scaled_kwh: MomentDiagnostics,
    pub price: MomentDiagnostics,
    pub payback_years: MomentDiagnostics,
}

/// Audit records rescaled to the median project size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledDataset {
    /// Cost per kWh saved, rescaled by the median project's kWh.
    pub scaled_cost: Vec<f64>,
    /// kWh saved per dollar, rescaled by the median project's cost.
    pub scaled_kwh: Vec<f64>,
    pub price: Vec<f64>,
    /// Fraction of records marked implemented.
    pub observed_rate: f64,
    pub summary: DatasetSummary,
}

/// Transforms records into relative values scaled to the median
/// project: `scaled_cost = (cost/kwh)·median(kwh)` and
/// `scaled_kwh = (kwh/cost)·median(cost)`. Prices pass through.
pub fn scale_to_median(records: &[AuditRecord]) -> Result<ScaledDataset> {
    if records.len() < 2 {
        return Err(Error::Data(format!(
            "median scaling needs at least 2 records, got {}",
            records.len()
        )));
    }
    if let Some(bad) = records
        .iter()
        .find(|r| r.cost <= 0.0 || r.annual_kwh_saved <= 0.0)
    {
        return Err(Error::Data(format!(
            "zero cost or kwh must be filtered before scaling: {bad:?}"
        )));
    }

    let costs: Vec<f64> = records.iter().map(|r| r.cost).collect();
    let kwhs: Vec<f64> = records.iter().map(|r| r.annual_kwh_saved).collect();
    let median_cost = median_of(&costs);
    let median_kwh = median_of(&kwhs);

    let scaled_cost: Vec<f64> = records
        .iter()
        .map(|r| r.cost / r.annual_kwh_saved * median_kwh)
        .collect();
    let scaled_kwh: Vec<f64> = records
        .iter()
        .map(|r| r.annual_kwh_saved / r.cost * median_cost)
        .collect();
    let price: Vec<f64> = records.iter().map(|r| r.price).collect();
    let payback: Vec<f64> = records.iter().map(|r| r.payback_years()).collect();

    let implemented = records.iter().filter(|r| r.implemented).count();
    let summary = DatasetSummary {
        scaled_cost: moment_diagnostics(&scaled_cost)?,
        scaled_kwh: moment_diagnostics(&scaled_kwh)?,
        price: moment_diagnostics(&price)?,
        payback_years: moment_diagnostics(&payback)?,
    };

    Ok(ScaledDataset {
        scaled_cost,
        scaled_kwh,
        price,
        observed_rate: implemented as f64 / records.len() as f64,
        summary,
    })
}

/// Literature-based parts of the calibration that are not fitted to the
/// audit data. The default carries the reference values: discount rate
/// N(8%, 3%) floored at 0, lifetime N(15, 3) floored at 0, payback
/// threshold N(2, 1) truncated to [1, 5], loss-aversion constants and
/// the (0.4, 0.3, 0.3) protocol mix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiteratureSpecs {
    pub dist_r: DistributionSpec,
    pub dist_n: DistributionSpec,
    pub dist_b: DistributionSpec,
    pub behavioural: BehaviouralConstants,
    pub ensemble: EnsembleWeights,
}

impl Default for LiteratureSpecs {
    fn default() -> Self {
        let reference = CalibrationConfig::default();
        Self {
            dist_r: reference.dist_r,
            dist_n: reference.dist_n,
            dist_b: reference.dist_b,
            behavioural: reference.behavioural,
            ensemble: reference.ensemble,
        }
    }
}

/// Fits the three Weibull distributions to the scaled dataset and
/// assembles the full calibration, copying the literature block
/// verbatim and defaulting trials and seed.
pub fn calibrate(
    dataset: &ScaledDataset,
    literature: &LiteratureSpecs,
) -> Result<CalibrationConfig> {
    if dataset.scaled_cost.is_empty() {
        return Err(Error::Data("cannot calibrate from an empty dataset".into()));
    }
    let fit = |name: &str, samples: &[f64]| -> Result<DistributionSpec> {
        let (shape, scale) =
            fit_weibull_mle(samples).map_err(|e| Error::Fit(format!("{name}: {e}")))?;
        Ok(DistributionSpec::Weibull { shape, scale })
    };
    let defaults = CalibrationConfig::default();
    Ok(CalibrationConfig {
        dist_delta_c: fit("scaled_cost", &dataset.scaled_cost)?,
        dist_price: fit("price", &dataset.price)?,
        dist_delta_q: fit("scaled_kwh", &dataset.scaled_kwh)?,
        dist_r: literature.dist_r.clone(),
        dist_n: literature.dist_n.clone(),
        dist_b: literature.dist_b.clone(),
        gamma: 1.0,
        behavioural: literature.behavioural,
        ensemble: literature.ensemble,
        trials: defaults.trials,
        seed: defaults.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "year,cost_usd,annual_kwh_saved,electricity_price_usd_per_kwh,implemented";

    fn record(cost: f64, kwh: f64, price: f64, implemented: bool) -> AuditRecord {
        AuditRecord {
            year: 2010,
            cost,
            annual_kwh_saved: kwh,
            price,
            implemented,
        }
    }

    #[test]
    fn empty_file_with_header_parses_to_nothing() {
        let report = parse_reader(format!("{HEADER}\n").as_bytes()).unwrap();
        assert!(report.records.is_empty());
        assert!(report.row_errors.is_empty());
    }

    #[test]
    fn single_row_round_trips_exactly() {
        let csv = format!("{HEADER}\n2011,8685,43280,0.07,1\n");
        let report = parse_reader(csv.as_bytes()).unwrap();
        assert_eq!(
            report.records,
            vec![record(8685.0, 43280.0, 0.07, true)]
                .into_iter()
                .map(|mut r| {
                    r.year = 2011;
                    r
                })
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn missing_column_is_a_schema_error() {
        let csv = "year,cost_usd,annual_kwh_saved,implemented\n2011,1,2,1\n";
        assert!(matches!(
            parse_reader(csv.as_bytes()),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn column_order_does_not_matter() {
        let csv = "implemented,electricity_price_usd_per_kwh,annual_kwh_saved,cost_usd,year\n\
                   0,0.07,43280,8685,2012\n";
        let report = parse_reader(csv.as_bytes()).unwrap();
        assert_eq!(report.records.len(), 1);
        assert_eq!(report.records[0].cost, 8685.0);
        assert!(!report.records[0].implemented);
    }

    #[test]
    fn malformed_rows_are_reported_with_line_numbers() {
        let csv = format!(
            "{HEADER}\n2011,8685,43280,0.07,1\n2011,not_a_number,43280,0.07,1\n2011,5,10,0.07,maybe\n"
        );
        let report = parse_reader(csv.as_bytes()).unwrap();
        assert_eq!(report.records.len(), 1);
        assert_eq!(report.row_errors.len(), 2);
        assert_eq!(report.row_errors[0].line, 3);
        assert_eq!(report.row_errors[1].line, 4);
        let text = report.error_report();
        assert!(text.contains("line 3:"), "{text}");
        assert!(text.contains("not_a_number"), "{text}");
        assert!(report.require_clean("test.csv").is_err());
    }

    #[test]
    fn filtering_removes_zero_cost_and_long_paybacks() {
        let records = vec![
            record(0.0, 40_000.0, 0.07, true),
            record(8_685.0, 43_280.0, 0.07, true), // payback 2.87 years
            record(100_000.0, 5_000.0, 0.05, false), // payback 400 years
        ];
        let kept = filter_outliers(&records, DEFAULT_MIN_COST, DEFAULT_MAX_PAYBACK_YEARS);
        assert_eq!(kept, vec![records[1]]);

        // payback of exactly 2.65 years is retained
        let ok = record(2.65 * 0.07 * 43_280.0, 43_280.0, 0.07, true);
        assert!((ok.payback_years() - 2.65).abs() < 1e-12);
        assert_eq!(filter_outliers(&[ok], 1.0, 20.0).len(), 1);
    }

    #[test]
    fn filtering_is_idempotent_and_keeps_clean_input() {
        let clean: Vec<AuditRecord> = (1..40)
            .map(|i| record(1_000.0 + 300.0 * i as f64, 40_000.0, 0.07, i % 2 == 0))
            .collect();
        let once = filter_outliers(&clean, 1.0, 20.0);
        assert_eq!(once, clean);
        assert_eq!(filter_outliers(&once, 1.0, 20.0), once);
    }

    #[test]
    fn scaling_identical_records_is_identity() {
        let records = vec![record(10_000.0, 50_000.0, 0.07, true); 4];
        let scaled = scale_to_median(&records).unwrap();
        assert!(scaled
            .scaled_cost
            .iter()
            .all(|c| (c - 10_000.0).abs() < 1e-9));
        assert!(scaled
            .scaled_kwh
            .iter()
            .all(|q| (q - 50_000.0).abs() < 1e-9));
        assert_eq!(scaled.observed_rate, 1.0);
    }

    #[test]
    fn equal_kwh_means_costs_pass_through() {
        let records = vec![
            record(10.0, 100.0, 0.07, true),
            record(30.0, 100.0, 0.07, false),
        ];
        let scaled = scale_to_median(&records).unwrap();
        assert_eq!(scaled.scaled_cost, vec![10.0, 30.0]);
        assert_eq!(scaled.observed_rate, 0.5);
    }

    #[test]
    fn scaling_product_identity_holds_exactly() {
        // scaled_cost_i · scaled_kwh_i = median(kwh) · median(cost) for every record.
        let records: Vec<AuditRecord> = (1..=25)
            .map(|i| {
                record(
                    500.0 + 957.0 * i as f64,
                    10_000.0 + 3_777.0 * ((i * 7) % 25) as f64,
                    0.05 + 0.002 * i as f64,
                    i % 2 == 0,
                )
            })
            .collect();
        let scaled = scale_to_median(&records).unwrap();
        let median_cost = median_of(&records.iter().map(|r| r.cost).collect::<Vec<_>>());
        let median_kwh = median_of(
            &records
                .iter()
                .map(|r| r.annual_kwh_saved)
                .collect::<Vec<_>>(),
        );
        for (c, q) in scaled.scaled_cost.iter().zip(&scaled.scaled_kwh) {
            let product = c * q;
            let expected = median_cost * median_kwh;
            assert!((product - expected).abs() / expected < 1e-12);
        }
    }

    #[test]
    fn scaling_requires_filtered_input() {
        let records = vec![
            record(0.0, 100.0, 0.07, true),
            record(10.0, 100.0, 0.07, true),
        ];
        assert!(matches!(scale_to_median(&records), Err(Error::Data(_))));
        assert!(matches!(
            scale_to_median(&records[1..2]),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn calibration_round_trips_through_the_fitted_distributions() {
        use crate::distributions::SampleStream;

        // Synthesize a dataset directly from the reference Weibulls and
        // check that calibration recovers their parameters.
        let reference = CalibrationConfig::default();
        let mut rng = SampleStream::new(2024, 0).rng();
        let n = 4_000;
        let draw = |spec: &DistributionSpec, rng: &mut rand_chacha::ChaCha8Rng| {
            (0..n)
                .map(|_| spec.sample_with(rng).unwrap())
                .collect::<Vec<f64>>()
        };
        let scaled_cost = draw(&reference.dist_delta_c, &mut rng);
        let scaled_kwh = draw(&reference.dist_delta_q, &mut rng);
        let price = draw(&reference.dist_price, &mut rng);
        let dataset = ScaledDataset {
            observed_rate: 0.45,
            summary: DatasetSummary {
                scaled_cost: moment_diagnostics(&scaled_cost).unwrap(),
                scaled_kwh: moment_diagnostics(&scaled_kwh).unwrap(),
                price: moment_diagnostics(&price).unwrap(),
                payback_years: moment_diagnostics(&price).unwrap(),
            },
            scaled_cost,
            scaled_kwh,
            price,
        };
        let config = calibrate(&dataset, &LiteratureSpecs::default()).unwrap();

        let check = |fitted: &DistributionSpec, target: &DistributionSpec| {
            let (
                DistributionSpec::Weibull {
                    shape: fs,
                    scale: fc,
                },
                DistributionSpec::Weibull {
                    shape: ts,
                    scale: tc,
                },
            ) = (fitted, target)
            else {
                panic!("expected weibull specs");
            };
            assert!((fs - ts).abs() / ts < 0.05, "shape {fs} vs {ts}");
            assert!((fc - tc).abs() / tc < 0.05, "scale {fc} vs {tc}");
        };
        check(&config.dist_delta_c, &reference.dist_delta_c);
        check(&config.dist_delta_q, &reference.dist_delta_q);
        check(&config.dist_price, &reference.dist_price);

        // literature block copied verbatim
        assert_eq!(config.dist_r, reference.dist_r);
        assert_eq!(config.dist_n, reference.dist_n);
        assert_eq!(config.dist_b, reference.dist_b);
        assert_eq!(config.trials, 10_000);
        assert_eq!(config.seed, 42);
    }

    #[test]
    fn empty_dataset_cannot_calibrate() {
        let empty = ScaledDataset {
            scaled_cost: vec![],
            scaled_kwh: vec![],
            price: vec![],
            observed_rate: 0.0,
            summary: DatasetSummary {
                scaled_cost: moment_diagnostics(&[0.0, 1.0]).unwrap(),
                scaled_kwh: moment_diagnostics(&[0.0, 1.0]).unwrap(),
                price: moment_diagnostics(&[0.0, 1.0]).unwrap(),
                payback_years: moment_diagnostics(&[0.0, 1.0]).unwrap(),
            },
        };
        assert!(matches!(
            calibrate(&empty, &LiteratureSpecs::default()),
            Err(Error::Data(_))
        ));
    }
}
