use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use super::DistributionError;

/// Rejection attempts before a truncated draw is clamped into its bounds.
pub const MAX_REJECTIONS: usize = 1000;

/// A log-normal distribution given by its own mean and standard deviation
/// (not those of the underlying normal), optionally truncated to
/// `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogNormalSpec {
    pub mean: f64,
    pub std_dev: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
}

impl LogNormalSpec {
    /// Age in years over the whole data set.
    pub const AGE_MEAN: f64 = 61.5594489311164;
    pub const AGE_STD_DEV: f64 = 17.495923251794;
    /// Length of stay in days.
    pub const LOS_MEAN: f64 = 4.02136785471962;
    pub const LOS_STD_DEV: f64 = 1.24578691452702;
    /// Length of registration (days between registration and admission).
    pub const LOR_MEAN: f64 = 6.11783570735678;
    pub const LOR_STD_DEV: f64 = 1.5118524126249;

    pub fn new(mean: f64, std_dev: f64) -> Result<Self, DistributionError> {
        let spec = Self {
            mean,
            std_dev,
            min: None,
            max: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn truncated(
        mut self,
        min: Option<f64>,
        max: Option<f64>,
    ) -> Result<Self, DistributionError> {
        self.min = min;
        self.max = max;
        self.validate()?;
        Ok(self)
    }

    pub fn default_age() -> Self {
        Self {
            mean: Self::AGE_MEAN,
            std_dev: Self::AGE_STD_DEV,
            min: None,
            max: None,
        }
    }

    pub fn default_los() -> Self {
        Self {
            mean: Self::LOS_MEAN,
            std_dev: Self::LOS_STD_DEV,
            min: None,
            max: None,
        }
    }

    pub fn default_lor() -> Self {
        Self {
            mean: Self::LOR_MEAN,
            std_dev: Self::LOR_STD_DEV,
            min: None,
            max: None,
        }
    }

    pub fn validate(&self) -> Result<(), DistributionError> {
        let bad = |reason: &str| Err(DistributionError::InvalidParameters(reason.to_string()));
        if !self.mean.is_finite() || !self.std_dev.is_finite() {
            return bad("mean and std_dev must be finite");
        }
        if self.mean <= 0.0 || self.std_dev <= 0.0 {
            return bad("mean and std_dev must be positive");
        }
        if self.min.is_some_and(|v| !v.is_finite()) || self.max.is_some_and(|v| !v.is_finite()) {
            return bad("truncation bounds must be finite");
        }
        if let (Some(lo), Some(hi)) = (self.min, self.max) {
            if lo >= hi {
                return bad("min must be below max");
            }
        }
        Ok(())
    }

    /// `(μ̂, σ̂)` of the underlying normal:
    /// `μ̂ = ln(m² / √(m² + s²))`, `σ̂ = √ln(1 + s²/m²)`.
    pub fn underlying(&self) -> (f64, f64) {
        let m2 = self.mean * self.mean;
        let s2 = self.std_dev * self.std_dev;
        let mu = (m2 / (m2 + s2).sqrt()).ln();
        let sigma = (s2 / m2).ln_1p().sqrt();
        (mu, sigma)
    }

    /// Mean and standard deviation of `exp(N(μ̂, σ̂²))`.
    pub fn moments_of_underlying(mu: f64, sigma: f64) -> (f64, f64) {
        let s2 = sigma * sigma;
        let mean = (mu + s2 / 2.0).exp();
        let var = s2.exp_m1() * (2.0 * mu + s2).exp();
        (mean, var.sqrt())
    }

    fn contains(&self, value: f64) -> bool {
        self.min.is_none_or(|lo| value >= lo) && self.max.is_none_or(|hi| value <= hi)
    }

    fn clamp(&self, value: f64) -> f64 {
        let value = self.min.map_or(value, |lo| value.max(lo));
        self.max.map_or(value, |hi| value.min(hi))
    }
}

/// Prepared sampler for a [`LogNormalSpec`].
#[derive(Debug, Clone)]
pub struct LogNormalSampler {
    spec: LogNormalSpec,
    inner: LogNormal<f64>,
}

impl LogNormalSampler {
    pub fn new(spec: LogNormalSpec) -> Result<Self, DistributionError> {
        spec.validate()?;
        let (mu, sigma) = spec.underlying();
        let inner = LogNormal::new(mu, sigma)
            .map_err(|e| DistributionError::InvalidParameters(e.to_string()))?;
        Ok(Self { spec, inner })
    }

    pub fn spec(&self) -> &LogNormalSpec {
        &self.spec
    }

    /// One real-valued draw, resampled until it lies in the truncation
    /// bounds and clamped after [`MAX_REJECTIONS`] attempts.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut last = self.spec.mean;
        for _ in 0..MAX_REJECTIONS {
            let value = self.inner.sample(rng);
            if self.spec.contains(value) {
                return value;
            }
            last = value;
        }
        self.spec.clamp(last)
    }

    /// Nearest-integer draw inside `[lo, hi]` and the spec's own bounds.
    pub(crate) fn sample_integer<R: Rng + ?Sized>(&self, rng: &mut R, lo: i64, hi: i64) -> i64 {
        let mut last = self.spec.mean;
        for _ in 0..MAX_REJECTIONS {
            let value = self.inner.sample(rng);
            let rounded = value.round();
            if self.spec.contains(value) && rounded >= lo as f64 && rounded <= hi as f64 {
                return rounded as i64;
            }
            last = value;
        }
        (self.spec.clamp(last).round() as i64).clamp(lo, hi)
    }
}

/// One draw from a (possibly truncated) log-normal.
pub fn sample_lognormal<R: Rng + ?Sized>(
    spec: &LogNormalSpec,
    rng: &mut R,
) -> Result<f64, DistributionError> {
    Ok(LogNormalSampler::new(*spec)?.sample(rng))
}
