//! Population generation, per-level Monte Carlo simulation and
//! aggregation of implementation rates and value statistics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decision::{
    assign_level_with, decide, npb_level2, npb_level3, npv_level0, npv_level1,
    BehaviouralConstants, EnsembleWeights, FirmDraw,
};
use crate::distributions::{DistributionSpec, SampleStream};
use crate::{Error, Result};

/// Above this trial count, raw per-firm values are only kept in the
/// result when explicitly requested.
const RETAIN_DEFAULT_MAX: usize = 1_000_000;

/// Simulation target: one of the four protocols or the ensemble mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LevelTag {
    #[serde(rename = "L0")]
    Technological,
    #[serde(rename = "L1")]
    Optimizing,
    #[serde(rename = "L2")]
    Satisficing,
    #[serde(rename = "L3")]
    Behavioural,
    Ensemble,
}

impl LevelTag {
    pub const ALL: [LevelTag; 5] = [
        LevelTag::Technological,
        LevelTag::Optimizing,
        LevelTag::Satisficing,
        LevelTag::Behavioural,
        LevelTag::Ensemble,
    ];

    /// The heterogeneous levels simulated from firm draws.
    pub const HETEROGENEOUS: [LevelTag; 3] = [
        LevelTag::Optimizing,
        LevelTag::Satisficing,
        LevelTag::Behavioural,
    ];
}

impl std::fmt::Display for LevelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LevelTag::Technological => "L0",
            LevelTag::Optimizing => "L1",
            LevelTag::Satisficing => "L2",
            LevelTag::Behavioural => "L3",
            LevelTag::Ensemble => "Ensemble",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for LevelTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l0" | "0" | "technological" => Ok(LevelTag::Technological),
            "l1" | "1" | "optimizing" => Ok(LevelTag::Optimizing),
            "l2" | "2" | "satisficing" => Ok(LevelTag::Satisficing),
            "l3" | "3" | "behavioural" => Ok(LevelTag::Behavioural),
            "e" | "ensemble" => Ok(LevelTag::Ensemble),
            other => Err(Error::Config(format!("unknown level tag '{other}'"))),
        }
    }
}

/// The full calibrated parameter set driving a simulation run.
///
/// The default reproduces the electric-motor calibration: Weibull fits
/// for cost, price and quantity saved, literature-based truncated
/// normals for discount rate, lifetime and payback threshold, and the
/// standard loss-aversion constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationConfig {
    pub dist_delta_c: DistributionSpec,
    pub dist_price: DistributionSpec,
    pub dist_delta_q: DistributionSpec,
    pub dist_r: DistributionSpec,
    pub dist_n: DistributionSpec,
    pub dist_b: DistributionSpec,
    /// Implicit weight on expected savings, applied to every firm.
    pub gamma: f64,
    pub behavioural: BehaviouralConstants,
    pub ensemble: EnsembleWeights,
    pub trials: usize,
    pub seed: u64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            dist_delta_c: DistributionSpec::Weibull {
                shape: 1.51,
                scale: 11_493.28,
            },
            dist_price: DistributionSpec::Weibull {
                shape: 2.46,
                scale: 0.08,
            },
            dist_delta_q: DistributionSpec::Weibull {
                shape: 1.34,
                scale: 68_426.27,
            },
            dist_r: DistributionSpec::TruncatedNormal {
                mu: 0.08,
                sigma: 0.03,
                min: 0.0,
                max: f64::INFINITY,
            },
            dist_n: DistributionSpec::TruncatedNormal {
                mu: 15.0,
                sigma: 3.0,
                min: 0.0,
                max: f64::INFINITY,
            },
            dist_b: DistributionSpec::TruncatedNormal {
                mu: 2.0,
                sigma: 1.0,
                min: 1.0,
                max: 5.0,
            },
            gamma: 1.0,
            behavioural: BehaviouralConstants::default(),
            ensemble: EnsembleWeights::default(),
            trials: 10_000,
            seed: 42,
        }
    }
}

impl CalibrationConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, spec) in self.distributions() {
            spec.validate()
                .map_err(|e| Error::Config(format!("{name}: {e}")))?;
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!(
                "gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        self.behavioural.validate()?;
        self.ensemble.validate()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        Ok(())
    }

    fn distributions(&self) -> [(&'static str, &DistributionSpec); 6] {
        [
            ("dist_delta_c", &self.dist_delta_c),
            ("dist_price", &self.dist_price),
            ("dist_delta_q", &self.dist_delta_q),
            ("dist_r", &self.dist_r),
            ("dist_n", &self.dist_n),
            ("dist_b", &self.dist_b),
        ]
    }
}

/// Summary statistics of the simulated decision values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueStats {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub std: f64,
}

impl ValueStats {
    fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        debug_assert!(n > 0);
        let n_f = n as f64;
        let mean = values.iter().sum::<f64>() / n_f;
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n_f - 1.0)).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            median: crate::distributions::median_of(values),
            min,
            max,
            std,
        }
    }
}

/// Aggregated outcome of one simulated level.
///
/// JSON serialization carries the rate and statistics only; raw values
/// are exported separately (CSV) when retained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub level_tag: LevelTag,
    pub implementation_rate: f64,
    pub stats: ValueStats,
    #[serde(skip)]
    pub values: Option<Vec<f64>>,
    #[serde(skip)]
    pub adopt_flags: Option<Vec<bool>>,
}

/// Draws the full firm population for a configuration.
///
/// Firm `i` consumes stream `i` of the configured seed, sampling in the
/// fixed order cost, price, quantity, rate, lifetime, threshold, level;
/// lifetimes and thresholds are rounded to whole years after sampling.
pub fn draw_population(config: &CalibrationConfig) -> Result<Vec<FirmDraw>> {
    config.validate()?;
    (0..config.trials)
        .into_par_iter()
        .map(|i| draw_firm(config, i as u64))
        .collect()
}

fn draw_firm(config: &CalibrationConfig, index: u64) -> Result<FirmDraw> {
    let mut rng = SampleStream::new(config.seed, index).rng();
    let delta_c = config.dist_delta_c.sample_with(&mut rng)?;
    let price = config.dist_price.sample_with(&mut rng)?;
    let delta_q = config.dist_delta_q.sample_with(&mut rng)?;
    let r = config.dist_r.sample_with(&mut rng)?;
    let n_raw = config.dist_n.sample_with(&mut rng)?.round();
    let b_raw = config.dist_b.sample_with(&mut rng)?.round();
    let level = assign_level_with(&config.ensemble, &mut rng)?;
    if n_raw < 0.0 {
        return Err(Error::Sampling(format!(
            "negative lifetime draw {n_raw} for firm {index}"
        )));
    }
    if !(1.0..=5.0).contains(&b_raw) {
        return Err(Error::Sampling(format!(
            "payback threshold draw {b_raw} outside 1..=5 for firm {index}"
        )));
    }
    let firm = FirmDraw {
        delta_c,
        price,
        delta_q,
        r,
        n: n_raw as u32,
        b: b_raw as u32,
        gamma: config.gamma,
        level,
    };
    firm.validate()?;
    Ok(firm)
}

/// Evaluates one decision value per firm.
///
/// A concrete level tag overrides each firm's assigned protocol;
/// `Ensemble` respects the assignments made at draw time.
pub fn evaluate_population(
    population: &[FirmDraw],
    tag: LevelTag,
    consts: &BehaviouralConstants,
) -> Result<Vec<f64>> {
    population
        .par_iter()
        .map(|firm| match tag {
            LevelTag::Technological => Err(Error::Config(
                "the technological level is a point estimate, not a per-firm evaluation".into(),
            )),
            LevelTag::Optimizing => npv_level1(firm),
            LevelTag::Satisficing => npb_level2(firm),
            LevelTag::Behavioural => npb_level3(firm, consts),
            LevelTag::Ensemble => decide(firm, consts).map(|(value, _)| value),
        })
        .collect()
}

/// Builds a [`SimulationResult`] from evaluated values.
pub fn summarize(tag: LevelTag, values: Vec<f64>, retain: bool) -> SimulationResult {
    let trials = values.len();
    let adopters = values.iter().filter(|v| **v > 0.0).count();
    let stats = ValueStats::from_values(&values);
    let (values, adopt_flags) = if retain {
        let flags = values.iter().map(|v| *v > 0.0).collect();
        (Some(values), Some(flags))
    } else {
        (None, None)
    };
    SimulationResult {
        level_tag: tag,
        implementation_rate: adopters as f64 / trials as f64,
        stats,
        values,
        adopt_flags,
    }
}

/// Runs the Monte Carlo simulation for one level with the default
/// retention policy (values kept up to one million trials).
pub fn simulate_level(config: &CalibrationConfig, tag: LevelTag) -> Result<SimulationResult> {
    let retain = config.trials <= RETAIN_DEFAULT_MAX;
    simulate_level_with_retention(config, tag, retain)
}

/// As [`simulate_level`] with an explicit retention choice.
pub fn simulate_level_with_retention(
    config: &CalibrationConfig,
    tag: LevelTag,
    retain: bool,
) -> Result<SimulationResult> {
    config.validate()?;
    if tag == LevelTag::Technological {
        // Point estimate at the distribution means; no sampling.
        let value = npv_level0(
            config.dist_delta_c.mean()?,
            config.dist_price.mean()?,
            config.dist_delta_q.mean()?,
            config.dist_r.mean()?,
            config.dist_n.mean()?.round() as u32,
        )?;
        return Ok(summarize(tag, vec![value], retain));
    }
    let population = draw_population(config)?;
    let values = evaluate_population(&population, tag, &config.behavioural)?;
    Ok(summarize(tag, values, retain))
}

/// One histogram bin: `[lower, upper)`, closed on the right for the
/// final bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Equal-width histogram over a result's retained values.
pub fn histogram(result: &SimulationResult, bin_count: usize) -> Result<Vec<HistogramBin>> {
    if bin_count == 0 {
        return Err(Error::Config("bin count must be at least 1".into()));
    }
    let values = result
        .values
        .as_ref()
        .ok_or_else(|| Error::State("histogram needs retained values".into()))?;
    let lo = result.stats.min;
    let hi = result.stats.max;
    let width = (hi - lo) / bin_count as f64;
    let mut counts = vec![0usize; bin_count];
    for v in values {
        let idx = if width > 0.0 {
            (((v - lo) / width).floor() as usize).min(bin_count - 1)
        } else {
            0
        };
        counts[idx] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            lower: lo + i as f64 * width,
            upper: if i + 1 == bin_count {
                hi
            } else {
                lo + (i + 1) as f64 * width
            },
            count,
        })
        .collect())
}
