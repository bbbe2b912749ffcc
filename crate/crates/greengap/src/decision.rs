//! The four investment decision protocols and ensemble level assignment,
//! evaluated on a single firm's realized parameters.
//!
//! Cash-flow convention: the upfront cost premium is paid now and the
//! annual savings are booked at the end of each year, so an expected
//! lifetime of `n` years contributes `n` discounted payments and a
//! payback threshold of `b` years contributes `b` undiscounted payments.
//! A firm adopts if and only if its decision value is strictly greater
//! than zero.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::SampleStream;
use crate::{Error, Result};

/// Which protocol a heterogeneous firm uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecisionLevel {
    /// Full-lifetime NPV with a private discount rate.
    Optimizing,
    /// Undiscounted payback comparison.
    Satisficing,
    /// Loss-aversion value function over payback cash flows.
    Behavioural,
}

/// One simulated firm's realized parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirmDraw {
    /// Investment cost premium, USD.
    pub delta_c: f64,
    /// Electricity price, USD/kWh.
    pub price: f64,
    /// Annual electricity saved, kWh/year.
    pub delta_q: f64,
    /// Private discount rate, fraction/year.
    pub r: f64,
    /// Expected lifetime, whole years.
    pub n: u32,
    /// Payback threshold, whole years in 1..=5.
    pub b: u32,
    /// Implicit weight on expected savings, in [0, 1].
    pub gamma: f64,
    /// Assigned decision protocol.
    pub level: DecisionLevel,
}

impl FirmDraw {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_c >= 0.0 && self.price >= 0.0 && self.delta_q >= 0.0 && self.r >= 0.0) {
            return Err(Error::Config(format!(
                "firm parameters must be nonnegative: delta_c={}, price={}, delta_q={}, r={}",
                self.delta_c, self.price, self.delta_q, self.r
            )));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!(
                "gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        if !(1..=5).contains(&self.b) {
            return Err(Error::Config(format!(
                "payback threshold must lie in 1..=5, got {}",
                self.b
            )));
        }
        Ok(())
    }
}

/// Loss-aversion value function constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BehaviouralConstants {
    /// Loss weighting, at least 1.
    pub lambda: f64,
    /// Benefit-sum exponent, in (0, 1].
    pub alpha: f64,
    /// Cost exponent, in (0, 1].
    pub beta: f64,
}

impl Default for BehaviouralConstants {
    fn default() -> Self {
        Self {
            lambda: 2.25,
            alpha: 0.88,
            beta: 0.88,
        }
    }
}

impl BehaviouralConstants {
    pub fn validate(&self) -> Result<()> {
        if self.lambda < 1.0 || self.lambda.is_nan() {
            return Err(Error::Config(format!(
                "lambda must be >= 1, got {}",
                self.lambda
            )));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

/// Probabilities of a firm using each heterogeneous protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleWeights {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl Default for EnsembleWeights {
    fn default() -> Self {
        Self {
            p1: 0.4,
            p2: 0.3,
            p3: 0.3,
        }
    }
}

impl EnsembleWeights {
    pub fn new(p1: f64, p2: f64, p3: f64) -> Self {
        Self { p1, p2, p3 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2), ("p3", self.p3)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        let total = self.p1 + self.p2 + self.p3;
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "level probabilities must sum to 1, got {total}"
            )));
        }
        Ok(())
    }
}

/// Present value of `n` end-of-year payments of 1 at rate `r`:
/// `Σ_{t=1..n} (1+r)^-t`, evaluated in closed form.
pub fn annuity_factor(r: f64, n: u32) -> Result<f64> {
    if r <= -1.0 {
        return Err(Error::Domain(format!(
            "discount rate must exceed -1, got {r}"
        )));
    }
    if n == 0 {
        return Ok(0.0);
    }
    if r == 0.0 {
        return Ok(n as f64);
    }
    // (1 − (1+r)^-n) / r via expm1/ln_1p, stable for small r.
    Ok(-(-(n as f64) * r.ln_1p()).exp_m1() / r)
}

/// Engineering benchmark: NPV of the representative firm at the
/// calibration point estimates.
pub fn npv_level0(delta_c: f64, price: f64, delta_q: f64, r: f64, n: u32) -> Result<f64> {
    Ok(-delta_c + price * delta_q * annuity_factor(r, n)?)
}

/// Optimizing protocol: full-lifetime NPV with the firm's private
/// discount rate and implicit savings weight.
pub fn npv_level1(firm: &FirmDraw) -> Result<f64> {
    firm.validate()?;
    Ok(-firm.delta_c + firm.gamma * firm.price * firm.delta_q * annuity_factor(firm.r, firm.n)?)
}

/// Satisficing protocol: undiscounted savings truncated at the payback
/// threshold.
pub fn npb_level2(firm: &FirmDraw) -> Result<f64> {
    firm.validate()?;
    Ok(-firm.delta_c + firm.price * firm.delta_q * firm.b as f64)
}

/// Behavioural protocol: loss-aversion value function applied to the
/// satisficing cash flows.
pub fn npb_level3(firm: &FirmDraw, consts: &BehaviouralConstants) -> Result<f64> {
    firm.validate()?;
    consts.validate()?;
    let benefits = firm.price * firm.delta_q * firm.b as f64;
    if firm.delta_c < 0.0 || benefits < 0.0 {
        return Err(Error::Domain(
            "fractional powers need nonnegative cost and benefit terms".into(),
        ));
    }
    Ok(-consts.lambda * firm.delta_c.powf(consts.beta) + benefits.powf(consts.alpha))
}

/// Randomly assigns a decision level with probabilities `(p1, p2, p3)`.
pub fn assign_level(weights: &EnsembleWeights, stream: SampleStream) -> Result<DecisionLevel> {
    assign_level_with(weights, &mut stream.rng())
}

/// As [`assign_level`], advancing an existing RNG.
pub fn assign_level_with<R: Rng + ?Sized>(
    weights: &EnsembleWeights,
    rng: &mut R,
) -> Result<DecisionLevel> {
    weights.validate()?;
    let u: f64 = rng.random();
    Ok(if u < weights.p1 {
        DecisionLevel::Optimizing
    } else if u < weights.p1 + weights.p2 {
        DecisionLevel::Satisficing
    } else {
        DecisionLevel::Behavioural
    })
}

/// Evaluates the firm's assigned protocol and applies the strict
/// adoption threshold: a value of exactly zero does not adopt.
pub fn decide(firm: &FirmDraw, consts: &BehaviouralConstants) -> Result<(f64, bool)> {
    let value = match firm.level {
        DecisionLevel::Optimizing => npv_level1(firm)?,
        DecisionLevel::Satisficing => npb_level2(firm)?,
        DecisionLevel::Behavioural => npb_level3(firm, consts)?,
    };
    Ok((value, value > 0.0))
}
