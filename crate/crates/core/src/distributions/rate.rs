use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::DistributionError;

/// `c3·x³ + c2·x² + c1·x + c0` in the patient's age `x`, clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatePolynomial {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl RatePolynomial {
    pub const fn new(c3: f64, c2: f64, c1: f64, c0: f64) -> Self {
        Self { c3, c2, c1, c0 }
    }

    pub const fn constant(rate: f64) -> Self {
        Self::new(0.0, 0.0, 0.0, rate)
    }

    pub const FEMALE: Self = Self::new(
        2.58204297e-6,
        -3.16813273e-4,
        8.9469195e-3,
        0.438171831286241,
    );
    pub const PRIVATE: Self = Self::new(1.61572557e-6, 2.86972783e-4, 1.34752628e-2, 0.271661363);
    pub const EMERGENCY: Self = Self::new(2.21895335e-6, 2.9891084e-4, 1.01995134e-2, 0.279651026);
    pub const COMPANION: Self =
        Self::new(5.65061344e-8, 2.83196514e-5, 3.01802321e-3, 0.0977778296);

    /// Unclamped value, Horner form.
    pub fn evaluate(&self, x: f64) -> f64 {
        ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0
    }

    pub fn rate_at(&self, age: u32) -> f64 {
        let value = self.evaluate(f64::from(age));
        if value.is_nan() {
            0.0
        } else {
            value.clamp(0.0, 1.0)
        }
    }

    pub fn coefficients(&self) -> [f64; 4] {
        [self.c3, self.c2, self.c1, self.c0]
    }

    pub fn is_finite(&self) -> bool {
        self.coefficients().iter().all(|c| c.is_finite())
    }
}

/// Age-dependent probabilities of the four boolean patient attributes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttributeRates {
    pub female: RatePolynomial,
    pub private: RatePolynomial,
    pub emergency: RatePolynomial,
    pub companion: RatePolynomial,
}

impl Default for AttributeRates {
    fn default() -> Self {
        Self {
            female: RatePolynomial::FEMALE,
            private: RatePolynomial::PRIVATE,
            emergency: RatePolynomial::EMERGENCY,
            companion: RatePolynomial::COMPANION,
        }
    }
}

/// Result of [`fit_rate_from_classes`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub polynomial: RatePolynomial,
    /// Degree actually fitted; below 3 when fewer than four distinct ages
    /// were given.
    pub degree: usize,
    pub residual_sum_squares: f64,
}

pub const MIN_FIT_POINTS: usize = 4;

/// Least-squares cubic through `(age class midpoint, rate)` points.
///
/// Ages are rescaled to `[-1, 1]` before solving, which keeps the normal
/// equations well conditioned at ages near 100.
pub fn fit_rate_from_classes(points: &[(f64, f64)]) -> Result<RateFit, DistributionError> {
    if points.len() < MIN_FIT_POINTS {
        return Err(DistributionError::TooFewPoints {
            given: points.len(),
            required: MIN_FIT_POINTS,
        });
    }
    for &(x, rate) in points {
        if !x.is_finite() || !rate.is_finite() {
            return Err(DistributionError::InvalidParameters(
                "fit points must be finite".into(),
            ));
        }
        if !(0.0..=1.0).contains(&rate) {
            return Err(DistributionError::RateOutOfRange(rate));
        }
    }

    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let degree = (xs.len() - 1).min(3);
    if degree < 3 {
        log::warn!(
            "only {} distinct ages among {} rate points; fitting degree {degree}",
            xs.len(),
            points.len()
        );
    }

    let lo = xs[0];
    let hi = xs[xs.len() - 1];
    let center = (lo + hi) / 2.0;
    let half = if hi > lo { (hi - lo) / 2.0 } else { 1.0 };

    let n = points.len();
    let design = DMatrix::from_fn(n, degree + 1, |i, j| {
        ((points[i].0 - center) / half).powi(j as i32)
    });
    let target = DVector::from_iterator(n, points.iter().map(|p| p.1));
    let scaled = design
        .clone()
        .svd(true, true)
        .solve(&target, 1e-14)
        .map_err(|e| DistributionError::InvalidParameters(e.to_string()))?;
    let residual_sum_squares = (&design * &scaled - &target).norm_squared();

    // expand Σ b_j ((x − center)/half)^j into monomials in x
    let mut coeffs = [0.0f64; 4];
    for (j, &b) in scaled.iter().enumerate() {
        let scale = b / half.powi(j as i32);
        for (k, c) in coeffs.iter_mut().enumerate().take(j + 1) {
            *c += scale * binomial(j, k) * (-center).powi((j - k) as i32);
        }
    }
    Ok(RateFit {
        polynomial: RatePolynomial::new(coeffs[3], coeffs[2], coeffs[1], coeffs[0]),
        degree,
        residual_sum_squares,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
