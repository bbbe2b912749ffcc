//! One-at-a-time parameter sweeps and implicit-parameter inversion:
//! finding the discount rate or savings weight that reconciles the
//! optimizing protocol with an observed adoption rate.

use serde::{Deserialize, Serialize};

use crate::engine::{simulate_level, CalibrationConfig, LevelTag};
use crate::DistributionSpec;
use crate::{Error, Result};

/// Stop the inversion when the simulated rate is this close to target.
const RATE_TOL: f64 = 0.005;

/// Or when the parameter bracket has shrunk below this width.
const BRACKET_TOL: f64 = 1e-4;

/// A model parameter that can be swept or inverted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Price,
    DeltaQ,
    DeltaC,
    B,
    R,
    Gamma,
}

impl SweepParameter {
    /// Legal domain for point values of this parameter.
    fn domain(&self) -> (f64, f64) {
        match self {
            SweepParameter::Price | SweepParameter::DeltaQ | SweepParameter::DeltaC => {
                (0.0, f64::INFINITY)
            }
            SweepParameter::B => (1.0, 5.0),
            SweepParameter::R => (0.0, f64::INFINITY),
            SweepParameter::Gamma => (0.0, 1.0),
        }
    }

    fn check(&self, value: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if !value.is_finite() || value < lo || value > hi {
            return Err(Error::Config(format!(
                "{self} value {value} outside legal domain [{lo}, {hi}]"
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepParameter::Price => "price",
            SweepParameter::DeltaQ => "delta_q",
            SweepParameter::DeltaC => "delta_c",
            SweepParameter::B => "b",
            SweepParameter::R => "r",
            SweepParameter::Gamma => "gamma",
        })
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "price" | "p" => Ok(SweepParameter::Price),
            "delta_q" | "q" => Ok(SweepParameter::DeltaQ),
            "delta_c" | "c" => Ok(SweepParameter::DeltaC),
            "b" => Ok(SweepParameter::B),
            "r" => Ok(SweepParameter::R),
            "gamma" => Ok(SweepParameter::Gamma),
            other => Err(Error::Config(format!("unknown sweep parameter '{other}'"))),
        }
    }
}

/// A one-at-a-time sweep: one parameter, a grid of point values, and
/// the heterogeneous levels to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub levels: Vec<LevelTag>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("sweep grid must be nonempty".into()));
        }
        for &v in &self.grid {
            self.parameter.check(v)?;
        }
        if self.levels.is_empty() {
            return Err(Error::Config("sweep needs at least one level".into()));
        }
        for level in &self.levels {
            if !LevelTag::HETEROGENEOUS.contains(level) {
                return Err(Error::Config(format!(
                    "sweeps run on the heterogeneous levels L1/L2/L3, got {level}"
                )));
            }
        }
        Ok(())
    }
}

/// Replaces the swept parameter with a point value, leaving every other
/// source of heterogeneity intact.
pub fn substitute(
    config: &CalibrationConfig,
    parameter: SweepParameter,
    value: f64,
) -> Result<CalibrationConfig> {
    parameter.check(value)?;
    let mut out = config.clone();
    let point = DistributionSpec::PointMass { value };
    match parameter {
        SweepParameter::Price => out.dist_price = point,
        SweepParameter::DeltaQ => out.dist_delta_q = point,
        SweepParameter::DeltaC => out.dist_delta_c = point,
        SweepParameter::B => out.dist_b = point,
        SweepParameter::R => out.dist_r = point,
        SweepParameter::Gamma => out.gamma = value,
    }
    Ok(out)
}

/// One row of a sensitivity sweep table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: SweepParameter,
    pub value: f64,
    pub level: LevelTag,
    pub implementation_rate: f64,
}

/// Runs the sweep, reusing the same population seed at every grid
/// point. Rows are ordered grid-major, then by level.
pub fn run_sweep(config: &CalibrationConfig, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.grid.len() * spec.levels.len());
    for &value in &spec.grid {
        let substituted = substitute(config, spec.parameter, value)?;
        for &level in &spec.levels {
            let result = simulate_level(&substituted, level)?;
            rows.push(SweepRow {
                parameter: spec.parameter,
                value,
                level,
                implementation_rate: result.implementation_rate,
            });
        }
    }
    Ok(rows)
}

/// Outcome of an implicit-parameter inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InversionResult {
    pub parameter: SweepParameter,
    #[serde(rename = "target")]
    pub target_rate: f64,
    pub solution: f64,
    pub achieved_rate: f64,
    pub iterations: usize,
}

/// Finds the point value of `r` or `gamma` at which the simulated
/// implementation rate matches `target_rate`.
///
/// The rate is a deterministic step function of the parameter for a
/// fixed seed, so the search is a plain bisection: it stops once the
/// simulated rate is within 0.005 of the target or the bracket is
/// narrower than 1e-4.
pub fn implicit_parameter(
    config: &CalibrationConfig,
    parameter: SweepParameter,
    target_rate: f64,
    level: LevelTag,
) -> Result<InversionResult> {
    if !matches!(parameter, SweepParameter::R | SweepParameter::Gamma) {
        return Err(Error::Config(format!(
            "implicit-parameter inversion supports r and gamma, got {parameter}"
        )));
    }
    if !(target_rate > 0.0 && target_rate < 1.0) {
        return Err(Error::Config(format!(
            "target rate must lie in (0, 1), got {target_rate}"
        )));
    }
    if !LevelTag::HETEROGENEOUS.contains(&level) {
        return Err(Error::Config(format!(
            "inversion runs on levels L1/L2/L3, got {level}"
        )));
    }

    let (mut lo, mut hi) = match parameter {
        SweepParameter::Gamma => (0.0, 1.0),
        SweepParameter::R => (0.0, 2.0),
        _ => unreachable!(),
    };
    let rate_at = |x: f64| -> Result<f64> {
        Ok(simulate_level(&substitute(config, parameter, x)?, level)?.implementation_rate)
    };

    let rate_lo = rate_at(lo)?;
    let rate_hi = rate_at(hi)?;
    let (mut lo_rate, mut hi_rate) = (rate_lo, rate_hi);
    if (target_rate - rate_lo.min(rate_hi)) < -RATE_TOL
        || (target_rate - rate_lo.max(rate_hi)) > RATE_TOL
    {
        return Err(Error::Inversion {
            parameter: parameter.to_string(),
            target: target_rate,
            lo,
            hi,
            rate_lo,
            rate_hi,
        });
    }

    let mut iterations = 2;
    let mut best = if (rate_lo - target_rate).abs() <= (rate_hi - target_rate).abs() {
        (lo, rate_lo)
    } else {
        (hi, rate_hi)
    };
    while (best.1 - target_rate).abs() >= RATE_TOL && (hi - lo) >= BRACKET_TOL {
        let mid = 0.5 * (lo + hi);
        let rate_mid = rate_at(mid)?;
        iterations += 1;
        if (rate_mid - target_rate).abs() < (best.1 - target_rate).abs() {
            best = (mid, rate_mid);
        }
        // keep the sub-bracket whose endpoint rates straddle the target
        let increasing = hi_rate >= lo_rate;
        if (increasing && rate_mid < target_rate) || (!increasing && rate_mid > target_rate) {
            lo = mid;
            lo_rate = rate_mid;
        } else {
            hi = mid;
            hi_rate = rate_mid;
        }
    }

    Ok(InversionResult {
        parameter,
        target_rate,
        solution: best.0,
        achieved_rate: best.1,
        iterations,
    })
}
