//! Tax and subsidy experiments: per-firm policy transforms, matched
//! baseline/policy comparisons, rate sweeps, equal-value policy pairs
//! and decision-level shifting.

use serde::{Deserialize, Serialize};

use crate::decision::{annuity_factor, EnsembleWeights, FirmDraw};
use crate::engine::{
    draw_population, evaluate_population, simulate_level, CalibrationConfig, LevelTag,
};
use crate::{Error, Result};

/// A tax and/or subsidy transform applied to firm draws.
///
/// An electricity tax raises each firm's price to `(1+t)·p`; a capital
/// subsidy lowers its cost premium to `(1−s)·ΔC`. `(0, 0)` is the
/// identity policy.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PolicySpec {
    pub tax_rate: f64,
    pub subsidy_rate: f64,
}

impl PolicySpec {
    pub fn tax(rate: f64) -> Self {
        Self {
            tax_rate: rate,
            subsidy_rate: 0.0,
        }
    }

    pub fn subsidy(rate: f64) -> Self {
        Self {
            tax_rate: 0.0,
            subsidy_rate: rate,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tax_rate.is_finite() && self.tax_rate >= 0.0) {
            return Err(Error::Config(format!(
                "tax rate must be >= 0, got {}",
                self.tax_rate
            )));
        }
        if !(0.0..=1.0).contains(&self.subsidy_rate) {
            return Err(Error::Config(format!(
                "subsidy rate must lie in [0, 1], got {}",
                self.subsidy_rate
            )));
        }
        Ok(())
    }
}

/// Which instrument a sweep row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Tax,
    Subsidy,
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PolicyKind::Tax => "tax",
            PolicyKind::Subsidy => "subsidy",
        })
    }
}

/// Matched-seed impact of a policy on one decision level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyImpact {
    pub level_tag: LevelTag,
    pub baseline_rate: f64,
    pub policy_rate: f64,
    /// `100 · (policy_rate − baseline_rate)`.
    pub delta_pp: f64,
    /// Change in the mean decision value, USD.
    pub delta_mean_value: f64,
    /// Average fiscal transfer per firm, USD. Subsidies count `s·ΔC`;
    /// taxes count the full discounted lifetime tax saving so both
    /// instruments are compared on equal fiscal footing.
    pub avg_transfer: f64,
}

/// Returns a copy of the firm with the policy applied.
pub fn apply_policy(firm: &FirmDraw, policy: &PolicySpec) -> Result<FirmDraw> {
    policy.validate()?;
    firm.validate()?;
    let mut out = *firm;
    out.price = (1.0 + policy.tax_rate) * firm.price;
    out.delta_c = (1.0 - policy.subsidy_rate) * firm.delta_c;
    Ok(out)
}

/// Discounted lifetime tax saving for one firm:
/// `Σ_{t=1..n} rate·p·Δq/(1+r)^t`.
fn discounted_tax_saving(firm: &FirmDraw, tax_rate: f64) -> Result<f64> {
    Ok(tax_rate * firm.price * firm.delta_q * annuity_factor(firm.r, firm.n)?)
}

/// Average per-firm transfer of a policy over a population.
fn average_transfer(population: &[FirmDraw], policy: &PolicySpec) -> Result<f64> {
    let mut total = 0.0;
    for firm in population {
        total += policy.subsidy_rate * firm.delta_c;
        if policy.tax_rate > 0.0 {
            total += discounted_tax_saving(firm, policy.tax_rate)?;
        }
    }
    Ok(total / population.len() as f64)
}

fn rate_of(values: &[f64]) -> f64 {
    values.iter().filter(|v| **v > 0.0).count() as f64 / values.len() as f64
}

fn mean_of(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Runs baseline and policy simulations on the same population seed and
/// reports the rate change, mean-value change and average transfer.
pub fn policy_impact(
    config: &CalibrationConfig,
    policy: &PolicySpec,
    tag: LevelTag,
) -> Result<PolicyImpact> {
    policy.validate()?;
    if tag == LevelTag::Technological {
        // Point-estimate comparison at the transformed means.
        let baseline = simulate_level(config, tag)?;
        let mut transformed = config.clone();
        transformed.dist_price = scaled_point(config.dist_price.mean()?, 1.0 + policy.tax_rate);
        transformed.dist_delta_c =
            scaled_point(config.dist_delta_c.mean()?, 1.0 - policy.subsidy_rate);
        let with_policy = simulate_level(&transformed, tag)?;
        let transfer = policy.subsidy_rate * config.dist_delta_c.mean()?
            + policy.tax_rate
                * config.dist_price.mean()?
                * config.dist_delta_q.mean()?
                * annuity_factor(config.dist_r.mean()?, config.dist_n.mean()?.round() as u32)?;
        return Ok(PolicyImpact {
            level_tag: tag,
            baseline_rate: baseline.implementation_rate,
            policy_rate: with_policy.implementation_rate,
            delta_pp: 100.0 * (with_policy.implementation_rate - baseline.implementation_rate),
            delta_mean_value: with_policy.stats.mean - baseline.stats.mean,
            avg_transfer: transfer,
        });
    }

    let population = draw_population(config)?;
    impact_on_population(&population, config, policy, tag)
}

fn scaled_point(mean: f64, factor: f64) -> crate::DistributionSpec {
    crate::DistributionSpec::PointMass {
        value: mean * factor,
    }
}

/// As [`policy_impact`] over an already drawn population.
pub fn impact_on_population(
    population: &[FirmDraw],
    config: &CalibrationConfig,
    policy: &PolicySpec,
    tag: LevelTag,
) -> Result<PolicyImpact> {
    let baseline_values = evaluate_population(population, tag, &config.behavioural)?;
    let transformed: Vec<FirmDraw> = population
        .iter()
        .map(|f| apply_policy(f, policy))
        .collect::<Result<_>>()?;
    let policy_values = evaluate_population(&transformed, tag, &config.behavioural)?;

    let baseline_rate = rate_of(&baseline_values);
    let policy_rate = rate_of(&policy_values);
    Ok(PolicyImpact {
        level_tag: tag,
        baseline_rate,
        policy_rate,
        delta_pp: 100.0 * (policy_rate - baseline_rate),
        delta_mean_value: mean_of(&policy_values) - mean_of(&baseline_values),
        avg_transfer: average_transfer(population, policy)?,
    })
}

/// The subsidy rate equivalent to a tax rate, plus a saturation flag
/// when the implied rate exceeds 100%.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalentSubsidy {
    pub tax_rate: f64,
    pub subsidy_rate: f64,
    pub saturated: bool,
}

/// Solves `mean(s·ΔC) = mean(Σ_{t=1..n} rate·p·Δq/(1+r)^t)` for `s`
/// from the analytic distribution means, clipping to [0, 1].
pub fn equivalent_subsidy_for_tax(
    config: &CalibrationConfig,
    tax_rate: f64,
) -> Result<EquivalentSubsidy> {
    if !(tax_rate.is_finite() && tax_rate >= 0.0) {
        return Err(Error::Config(format!(
            "tax rate must be >= 0, got {tax_rate}"
        )));
    }
    config.validate()?;
    let mean_saving = tax_rate
        * config.dist_price.mean()?
        * config.dist_delta_q.mean()?
        * annuity_factor(config.dist_r.mean()?, config.dist_n.mean()?.round() as u32)?;
    let raw = mean_saving / config.dist_delta_c.mean()?;
    Ok(EquivalentSubsidy {
        tax_rate,
        subsidy_rate: raw.min(1.0),
        saturated: raw > 1.0,
    })
}

/// One row of a policy sweep table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicySweepRow {
    pub policy_kind: PolicyKind,
    pub rate: f64,
    pub level: LevelTag,
    pub baseline_rate: f64,
    pub policy_rate: f64,
    pub delta_pp: f64,
    pub delta_mean_value: f64,
    pub avg_transfer: f64,
    /// Rate gain over the previous grid point, percentage points.
    pub marginal_pp: f64,
}

/// Cartesian sweep of tax and subsidy grids across decision levels.
///
/// Every point reuses the same seed-derived population, so differences
/// between rows reflect policy, not Monte Carlo noise. Rows are ordered
/// kind-major, then level, then grid index.
pub fn policy_sweep(
    config: &CalibrationConfig,
    tax_grid: &[f64],
    subsidy_grid: &[f64],
    levels: &[LevelTag],
) -> Result<Vec<PolicySweepRow>> {
    if tax_grid.is_empty() && subsidy_grid.is_empty() {
        return Err(Error::Config(
            "policy sweep needs at least one grid point".into(),
        ));
    }
    if levels.is_empty() {
        return Err(Error::Config(
            "policy sweep needs at least one level".into(),
        ));
    }
    let population = draw_population(config)?;
    let mut rows = Vec::new();
    for (kind, grid) in [
        (PolicyKind::Tax, tax_grid),
        (PolicyKind::Subsidy, subsidy_grid),
    ] {
        for level in levels {
            let mut previous_pp = 0.0;
            for &rate in grid {
                let policy = match kind {
                    PolicyKind::Tax => PolicySpec::tax(rate),
                    PolicyKind::Subsidy => PolicySpec::subsidy(rate),
                };
                let impact = impact_on_population(&population, config, &policy, *level)?;
                rows.push(PolicySweepRow {
                    policy_kind: kind,
                    rate,
                    level: *level,
                    baseline_rate: impact.baseline_rate,
                    policy_rate: impact.policy_rate,
                    delta_pp: impact.delta_pp,
                    delta_mean_value: impact.delta_mean_value,
                    avg_transfer: impact.avg_transfer,
                    marginal_pp: impact.delta_pp - previous_pp,
                });
                previous_pp = impact.delta_pp;
            }
        }
    }
    Ok(rows)
}

/// One point on the decision-level shift path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftPoint {
    /// 0 = all behavioural, 1 = all satisficing, 2 = all optimizing.
    pub position: f64,
    pub ensemble_rate: f64,
}

/// Ensemble weights along the shift path: stage one moves firms from
/// the behavioural to the satisficing protocol, stage two from
/// satisficing to optimizing.
pub fn shift_weights(position: f64) -> Result<EnsembleWeights> {
    if !(0.0..=2.0).contains(&position) {
        return Err(Error::Config(format!(
            "shift position must lie in [0, 2], got {position}"
        )));
    }
    Ok(if position <= 1.0 {
        EnsembleWeights::new(0.0, position, 1.0 - position)
    } else {
        EnsembleWeights::new(position - 1.0, 2.0 - position, 0.0)
    })
}

/// Simulates the ensemble at `steps` evenly spaced positions along the
/// shift path, all on the same seed.
pub fn shift_sweep(config: &CalibrationConfig, steps: usize) -> Result<Vec<ShiftPoint>> {
    if steps < 2 {
        return Err(Error::Config(format!(
            "shift sweep needs at least 2 steps, got {steps}"
        )));
    }
    (0..steps)
        .map(|k| {
            let position = 2.0 * k as f64 / (steps - 1) as f64;
            let mut shifted = config.clone();
            shifted.ensemble = shift_weights(position)?;
            let result = simulate_level(&shifted, LevelTag::Ensemble)?;
            Ok(ShiftPoint {
                position,
                ensemble_rate: result.implementation_rate,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::DecisionLevel;

    fn any_firm() -> FirmDraw {
        FirmDraw {
            delta_c: 10_367.0,
            price: 0.07,
            delta_q: 43_280.0,
            r: 0.08,
            n: 15,
            b: 2,
            gamma: 1.0,
            level: DecisionLevel::Optimizing,
        }
    }

    #[test]
    fn zero_policy_is_identity() {
        let firm = any_firm();
        assert_eq!(apply_policy(&firm, &PolicySpec::default()).unwrap(), firm);
    }

    #[test]
    fn tax_scales_price() {
        let firm = apply_policy(&any_firm(), &PolicySpec::tax(0.07)).unwrap();
        assert!((firm.price - 0.0749).abs() < 1e-12);
        assert_eq!(firm.delta_c, 10_367.0);
    }

    #[test]
    fn subsidy_scales_cost() {
        let firm = apply_policy(&any_firm(), &PolicySpec::subsidy(0.27)).unwrap();
        assert!((firm.delta_c - 7_567.91).abs() < 1e-9);
        assert_eq!(firm.price, 0.07);
        // transfer on the mean-cost firm
        assert!((0.27_f64 * 10_367.0 - 2_799.09).abs() < 1e-9);
    }

    #[test]
    fn invalid_policy_rates_are_rejected() {
        assert!(PolicySpec::tax(-0.1).validate().is_err());
        assert!(PolicySpec::subsidy(1.2).validate().is_err());
        assert!(PolicySpec {
            tax_rate: f64::NAN,
            subsidy_rate: 0.0
        }
        .validate()
        .is_err());
    }

    #[test]
    fn zero_policy_impact_is_exactly_zero() {
        let config = CalibrationConfig::default();
        for tag in LevelTag::HETEROGENEOUS {
            let impact = policy_impact(&config, &PolicySpec::default(), tag).unwrap();
            assert_eq!(impact.delta_pp, 0.0);
            assert_eq!(impact.delta_mean_value, 0.0);
            assert_eq!(impact.avg_transfer, 0.0);
            assert_eq!(impact.baseline_rate, impact.policy_rate);
        }
    }

    #[test]
    fn equivalent_subsidy_at_zero_tax_is_zero() {
        let config = CalibrationConfig::default();
        let eq = equivalent_subsidy_for_tax(&config, 0.0).unwrap();
        assert_eq!(eq.subsidy_rate, 0.0);
        assert!(!eq.saturated);
    }

    #[test]
    fn equivalent_subsidy_matches_reference_pair() {
        let config = CalibrationConfig::default();
        let eq = equivalent_subsidy_for_tax(&config, 0.07).unwrap();
        println!("equivalent subsidy for 7% tax: {:.4}", eq.subsidy_rate);
        assert!(
            (0.25..=0.29).contains(&eq.subsidy_rate),
            "{}",
            eq.subsidy_rate
        );
        assert!(!eq.saturated);
    }

    #[test]
    fn equivalent_subsidy_is_linear_until_saturation() {
        let config = CalibrationConfig::default();
        let s1 = equivalent_subsidy_for_tax(&config, 0.05).unwrap();
        let s2 = equivalent_subsidy_for_tax(&config, 0.10).unwrap();
        assert!((s2.subsidy_rate - 2.0 * s1.subsidy_rate).abs() < 1e-12);

        let big = equivalent_subsidy_for_tax(&config, 0.50).unwrap();
        assert!(big.saturated);
        assert_eq!(big.subsidy_rate, 1.0);
    }

    #[test]
    fn equal_transfer_identity_holds_analytically() {
        let config = CalibrationConfig::default();
        let t = 0.07;
        let eq = equivalent_subsidy_for_tax(&config, t).unwrap();
        let mean_saving = t
            * config.dist_price.mean().unwrap()
            * config.dist_delta_q.mean().unwrap()
            * annuity_factor(
                config.dist_r.mean().unwrap(),
                config.dist_n.mean().unwrap().round() as u32,
            )
            .unwrap();
        let mean_subsidy = eq.subsidy_rate * config.dist_delta_c.mean().unwrap();
        assert!((mean_subsidy - mean_saving).abs() / mean_saving < 0.01);
    }

    #[test]
    fn level1_tax_value_gain_equals_mean_transfer() {
        // Tax savings enter the optimizing NPV linearly, so the mean
        // value change must equal the mean discounted transfer.
        let config = CalibrationConfig::default();
        let impact = policy_impact(&config, &PolicySpec::tax(0.07), LevelTag::Optimizing).unwrap();
        assert!(
            (impact.delta_mean_value - impact.avg_transfer).abs() / impact.avg_transfer < 1e-6,
            "{} vs {}",
            impact.delta_mean_value,
            impact.avg_transfer
        );
    }

    #[test]
    fn rates_are_monotone_in_policy_strength() {
        let config = CalibrationConfig::default();
        let subsidies: Vec<f64> = vec![0.0, 0.1, 0.25, 0.5, 0.75, 1.0];
        let taxes: Vec<f64> = vec![0.0, 0.05, 0.1, 0.2, 0.3];
        let rows = policy_sweep(&config, &taxes, &subsidies, &LevelTag::HETEROGENEOUS).unwrap();
        for kind in [PolicyKind::Tax, PolicyKind::Subsidy] {
            for level in LevelTag::HETEROGENEOUS {
                let rates: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.policy_kind == kind && r.level == level)
                    .map(|r| r.policy_rate)
                    .collect();
                assert!(!rates.is_empty());
                assert!(
                    rates.windows(2).all(|w| w[1] >= w[0]),
                    "{kind} rates not monotone at {level}: {rates:?}"
                );
            }
        }
    }

    #[test]
    fn zero_subsidy_grid_has_zero_deltas() {
        let config = CalibrationConfig::default();
        let rows = policy_sweep(&config, &[], &[0.0], &LevelTag::HETEROGENEOUS).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows
            .iter()
            .all(|r| r.delta_pp == 0.0 && r.marginal_pp == 0.0));
    }

    #[test]
    fn sweep_row_order_is_deterministic() {
        let config = CalibrationConfig {
            trials: 2_000,
            ..CalibrationConfig::default()
        };
        let a = policy_sweep(&config, &[0.0, 0.1], &[0.2], &[LevelTag::Optimizing]).unwrap();
        let b = policy_sweep(&config, &[0.0, 0.1], &[0.2], &[LevelTag::Optimizing]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].policy_kind, PolicyKind::Tax);
        assert_eq!(a[2].policy_kind, PolicyKind::Subsidy);
    }

    #[test]
    fn shift_path_endpoints_reach_pure_levels() {
        let config = CalibrationConfig::default();
        let points = shift_sweep(&config, 5).unwrap();
        assert_eq!(points.len(), 5);
        assert_eq!(points[0].position, 0.0);
        assert_eq!(points[4].position, 2.0);

        let rate = |tag| simulate_level(&config, tag).unwrap().implementation_rate;
        assert!((points[0].ensemble_rate - rate(LevelTag::Behavioural)).abs() <= 0.03);
        assert!((points[2].ensemble_rate - rate(LevelTag::Satisficing)).abs() <= 0.03);
        assert!((points[4].ensemble_rate - rate(LevelTag::Optimizing)).abs() <= 0.03);
    }

    #[test]
    fn shift_steps_three_gives_integer_positions() {
        let config = CalibrationConfig {
            trials: 2_000,
            ..CalibrationConfig::default()
        };
        let points = shift_sweep(&config, 3).unwrap();
        let positions: Vec<f64> = points.iter().map(|p| p.position).collect();
        assert_eq!(positions, vec![0.0, 1.0, 2.0]);
        assert!(matches!(shift_sweep(&config, 1), Err(Error::Config(_))));
    }

    #[test]
    fn shift_weights_interpolate_in_two_stages() {
        assert_eq!(
            shift_weights(0.0).unwrap(),
            EnsembleWeights::new(0.0, 0.0, 1.0)
        );
        assert_eq!(
            shift_weights(0.5).unwrap(),
            EnsembleWeights::new(0.0, 0.5, 0.5)
        );
        assert_eq!(
            shift_weights(1.0).unwrap(),
            EnsembleWeights::new(0.0, 1.0, 0.0)
        );
        assert_eq!(
            shift_weights(1.5).unwrap(),
            EnsembleWeights::new(0.5, 0.5, 0.0)
        );
        assert_eq!(
            shift_weights(2.0).unwrap(),
            EnsembleWeights::new(1.0, 0.0, 0.0)
        );
        assert!(shift_weights(2.5).is_err());
    }
}
