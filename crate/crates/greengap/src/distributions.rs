//! Parametric distributions for calibration and population generation:
//! seeded sampling, analytic means, maximum-likelihood Weibull fitting
//! and moment diagnostics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::special::{gamma, normal_cdf, normal_pdf};
use crate::{Error, Result};

/// Upper bound on rejection-resampling attempts for a single truncated
/// draw. Exceeding it means the bounds carry essentially no mass.
const MAX_REJECTIONS: usize = 10_000;

/// Absolute tolerance on the fitted Weibull shape parameter.
const MLE_SHAPE_TOL: f64 = 1e-8;

/// Iteration cap for the MLE root search.
const MLE_MAX_ITER: usize = 200;

/// A deterministic, counter-based random stream.
///
/// Identical `(seed, stream_id)` pairs yield identical sample sequences
/// regardless of execution order or worker count. The engine assigns one
/// stream per firm index so populations are invariant to parallel
/// scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl SampleStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Instantiates the RNG positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// A samplable parametric distribution.
///
/// Serializes as a tagged JSON object, e.g.
/// `{"kind":"weibull","shape":1.51,"scale":11493.28}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionSpec {
    Weibull {
        shape: f64,
        scale: f64,
    },
    TruncatedNormal {
        mu: f64,
        sigma: f64,
        #[serde(default = "neg_infinity", skip_serializing_if = "is_neg_infinity")]
        min: f64,
        #[serde(default = "infinity", skip_serializing_if = "is_infinity")]
        max: f64,
    },
    PointMass {
        value: f64,
    },
    EmpiricalDiscrete {
        values: Vec<f64>,
        weights: Vec<f64>,
    },
}

fn neg_infinity() -> f64 {
    f64::NEG_INFINITY
}

fn infinity() -> f64 {
    f64::INFINITY
}

#[allow(clippy::trivially_copy_pass_by_ref)]
fn is_neg_infinity(x: &f64) -> bool {
    *x == f64::NEG_INFINITY
}

#[allow(clippy::trivially_copy_pass_by_ref)]
fn is_infinity(x: &f64) -> bool {
    *x == f64::INFINITY
}

impl DistributionSpec {
    /// Unbounded normal, expressed as a truncated normal with infinite
    /// bounds.
    pub fn normal(mu: f64, sigma: f64) -> Self {
        Self::TruncatedNormal {
            mu,
            sigma,
            min: f64::NEG_INFINITY,
            max: f64::INFINITY,
        }
    }

    /// Checks the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Weibull { shape, scale } => {
                if !(shape.is_finite() && *shape > 0.0 && scale.is_finite() && *scale > 0.0) {
                    return Err(Error::Config(format!(
                        "weibull requires shape > 0 and scale > 0, got shape={shape}, scale={scale}"
                    )));
                }
            }
            Self::TruncatedNormal {
                mu,
                sigma,
                min,
                max,
            } => {
                if !mu.is_finite() || !sigma.is_finite() || *sigma <= 0.0 {
                    return Err(Error::Config(format!(
                        "truncated normal requires finite mu and sigma > 0, got mu={mu}, sigma={sigma}"
                    )));
                }
                if min.is_nan() || max.is_nan() || min >= max {
                    return Err(Error::Config(format!(
                        "truncated normal requires min < max, got min={min}, max={max}"
                    )));
                }
            }
            Self::PointMass { value } => {
                if !value.is_finite() {
                    return Err(Error::Config(format!(
                        "point mass must be finite, got {value}"
                    )));
                }
            }
            Self::EmpiricalDiscrete { values, weights } => {
                if values.is_empty() || values.len() != weights.len() {
                    return Err(Error::Config(format!(
                        "empirical distribution needs matching nonempty values/weights, got {} / {}",
                        values.len(),
                        weights.len()
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Config("empirical values must be finite".into()));
                }
                if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(Error::Config(
                        "empirical weights must be nonnegative".into(),
                    ));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::Config(format!(
                        "empirical weights must sum to 1 within 1e-9, got {total}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Draws one value, advancing `rng`.
    ///
    /// Weibull draws use the inverse CDF; truncated normals use
    /// rejection resampling against the bounds (never clamping). A point
    /// mass still consumes one uniform so that swapping a sampled field
    /// for a point mass leaves the stream offsets of later fields
    /// untouched.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        self.validate()?;
        match self {
            Self::Weibull { shape, scale } => {
                let u: f64 = rng.random();
                Ok(scale * (-(1.0 - u).ln()).powf(1.0 / shape))
            }
            Self::TruncatedNormal {
                mu,
                sigma,
                min,
                max,
            } => {
                let normal = Normal::new(*mu, *sigma)
                    .map_err(|e| Error::Config(format!("normal parameters: {e}")))?;
                for _ in 0..MAX_REJECTIONS {
                    let x = normal.sample(rng);
                    if x >= *min && x <= *max {
                        return Ok(x);
                    }
                }
                Err(Error::Sampling(format!(
                    "no draw from N({mu}, {sigma}) landed in [{min}, {max}] after {MAX_REJECTIONS} attempts"
                )))
            }
            Self::PointMass { value } => {
                let _burn: f64 = rng.random();
                Ok(*value)
            }
            Self::EmpiricalDiscrete { values, weights } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (v, w) in values.iter().zip(weights) {
                    acc += w;
                    if u < acc {
                        return Ok(*v);
                    }
                }
                Ok(*values.last().expect("validated nonempty"))
            }
        }
    }

    /// Draws one value from the start of `stream`.
    pub fn sample(&self, stream: SampleStream) -> Result<f64> {
        self.sample_with(&mut stream.rng())
    }

    /// Analytic mean.
    pub fn mean(&self) -> Result<f64> {
        self.validate()?;
        Ok(match self {
            Self::Weibull { shape, scale } => scale * gamma(1.0 + 1.0 / shape),
            Self::TruncatedNormal {
                mu,
                sigma,
                min,
                max,
            } => {
                let a = (min - mu) / sigma;
                let b = (max - mu) / sigma;
                let z = normal_cdf(b) - normal_cdf(a);
                // pdf(±inf) is 0, so unbounded sides drop out naturally.
                let pdf_a = if a.is_finite() { normal_pdf(a) } else { 0.0 };
                let pdf_b = if b.is_finite() { normal_pdf(b) } else { 0.0 };
                mu + sigma * (pdf_a - pdf_b) / z
            }
            Self::PointMass { value } => *value,
            Self::EmpiricalDiscrete { values, weights } => {
                values.iter().zip(weights).map(|(v, w)| v * w).sum()
            }
        })
    }
}

/// Fits a Weibull distribution by maximum likelihood.
///
/// The shape solves the profile-likelihood equation
/// `n/k + Σ ln t − n·Σ(t^k ln t)/Σ t^k = 0`, which is strictly
/// decreasing in `k`; a bracketing bisection refined by Newton steps
/// converges to absolute tolerance 1e-8. The scale then follows in
/// closed form as `(Σ t^k / n)^(1/k)`.
pub fn fit_weibull_mle(samples: &[f64]) -> Result<(f64, f64)> {
    let n = samples.len();
    if n < 10 {
        return Err(Error::Data(format!(
            "weibull fit needs at least 10 samples, got {n}"
        )));
    }
    if let Some(bad) = samples.iter().find(|t| !t.is_finite() || **t <= 0.0) {
        return Err(Error::Data(format!(
            "weibull fit requires strictly positive samples, got {bad}"
        )));
    }
    let spread = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - samples.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread == 0.0 {
        return Err(Error::Fit(
            "samples are all equal; the shape MLE diverges".into(),
        ));
    }

    let n_f = n as f64;
    let ln_t: Vec<f64> = samples.iter().map(|t| t.ln()).collect();
    let sum_ln_t: f64 = ln_t.iter().sum();

    // profile equation and its derivative
    let eval = |k: f64| -> (f64, f64) {
        let mut s0 = 0.0;
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for (t, lt) in samples.iter().zip(&ln_t) {
            let tk = t.powf(k);
            s0 += tk;
            s1 += tk * lt;
            s2 += tk * lt * lt;
        }
        let f = n_f / k + sum_ln_t - n_f * s1 / s0;
        let df = -n_f / (k * k) - n_f * (s2 * s0 - s1 * s1) / (s0 * s0);
        (f, df)
    };

    // f(k) → +inf as k → 0; expand the upper end until the sign flips.
    let mut lo = 1e-3;
    let mut hi = 1.0;
    let mut iter = 0usize;
    while eval(hi).0 > 0.0 {
        lo = hi;
        hi *= 2.0;
        iter += 1;
        if hi > 1e6 || iter > MLE_MAX_ITER {
            return Err(Error::Fit(
                "profile equation has no root below shape 1e6 (near-degenerate data)".into(),
            ));
        }
    }

    let mut k = 0.5 * (lo + hi);
    loop {
        iter += 1;
        if iter > MLE_MAX_ITER {
            return Err(Error::Fit(format!(
                "shape search did not converge within {MLE_MAX_ITER} iterations"
            )));
        }
        let (f, df) = eval(k);
        if f > 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let newton = k - f / df;
        let next = if df.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - k).abs() < MLE_SHAPE_TOL || (hi - lo) < MLE_SHAPE_TOL {
            k = next;
            break;
        }
        k = next;
    }

    let s0: f64 = samples.iter().map(|t| t.powf(k)).sum();
    let scale = (s0 / n_f).powf(1.0 / k);
    if !k.is_finite() || !scale.is_finite() || k <= 0.0 || scale <= 0.0 {
        return Err(Error::Fit(format!(
            "fit produced invalid parameters ({k}, {scale})"
        )));
    }
    Ok((k, scale))
}

/// Standard sample statistics: mean, median, min, max, unbiased std,
/// adjusted skewness and excess kurtosis (NaN when the sample is too
/// small for the estimator).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentDiagnostics {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub std: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Computes [`MomentDiagnostics`] over at least two samples.
pub fn moment_diagnostics(samples: &[f64]) -> Result<MomentDiagnostics> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::Data(format!(
            "diagnostics need at least 2 samples, got {n}"
        )));
    }
    let n_f = n as f64;
    let mean = samples.iter().sum::<f64>() / n_f;
    let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let median = median_of(samples);

    let m2 = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n_f;
    let m3 = samples.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n_f;
    let m4 = samples.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n_f;
    let var = m2 * n_f / (n_f - 1.0);
    let std = var.sqrt();

    let skewness = if n >= 3 && m2 > 0.0 {
        let g1 = m3 / m2.powf(1.5);
        (n_f * (n_f - 1.0)).sqrt() / (n_f - 2.0) * g1
    } else if m2 == 0.0 {
        0.0
    } else {
        f64::NAN
    };
    let kurtosis = if n >= 4 && m2 > 0.0 {
        let g2 = m4 / (m2 * m2) - 3.0;
        ((n_f + 1.0) * g2 + 6.0) * (n_f - 1.0) / ((n_f - 2.0) * (n_f - 3.0))
    } else if m2 == 0.0 {
        0.0
    } else {
        f64::NAN
    };

    Ok(MomentDiagnostics {
        mean,
        median,
        min,
        max,
        std,
        skewness,
        kurtosis,
    })
}

/// Median with the even-count midpoint convention.
pub fn median_of(samples: &[f64]) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in samples"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}
