//! Generator template: one section per wizard step.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::distributions::{
    fit_rate_from_classes, AgeBounds, AgeLosChoice, AttributeRates, DistSpec, DistributionChoice,
    DistributionError, LogNormalSpec, RatePolynomial,
};
use crate::feasibility::{FeasibilityError, WardConfig};
use crate::model::{Horizon, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub start: StartStep,
    pub rooms: RoomsStep,
    #[serde(default)]
    pub age_los: AgeLosStep,
    #[serde(default)]
    pub lor: LorStep,
    #[serde(default)]
    pub rates: RatesStep,
    #[serde(default)]
    pub generate: GenerateStep,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartStep {
    /// Planning horizon `T` in days.
    pub horizon: u32,
    /// Target load `ℓ ∈ (0, 1]`.
    pub target_load: f64,
    #[serde(default)]
    pub ensure_feasibility: bool,
    /// Draw age and LOS from one joint table.
    #[serde(default)]
    pub combined_age_los: bool,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomsStep {
    pub capacities: Vec<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgeLosStep {
    #[serde(default)]
    pub distribution: AgeLosChoice,
    #[serde(default)]
    pub age_bounds: AgeBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LorStep {
    pub distribution: DistSpec,
}

impl Default for LorStep {
    fn default() -> Self {
        Self {
            distribution: DistSpec::LogNormal(LogNormalSpec::default_lor()),
        }
    }
}

/// A rate given directly as a cubic or as per-age-class values to fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum RateSpec {
    Polynomial(RatePolynomial),
    /// `(age class midpoint, rate)` pairs.
    PerClass {
        points: Vec<(f64, f64)>,
    },
}

impl RateSpec {
    pub fn resolve(&self) -> Result<RatePolynomial, DistributionError> {
        match self {
            RateSpec::Polynomial(p) if p.is_finite() => Ok(*p),
            RateSpec::Polynomial(_) => Err(DistributionError::InvalidParameters(
                "rate coefficients must be finite".into(),
            )),
            RateSpec::PerClass { points } => Ok(fit_rate_from_classes(points)?.polynomial),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesStep {
    pub female: RateSpec,
    pub private: RateSpec,
    pub emergency: RateSpec,
    pub companion: RateSpec,
}

impl Default for RatesStep {
    fn default() -> Self {
        let defaults = AttributeRates::default();
        Self {
            female: RateSpec::Polynomial(defaults.female),
            private: RateSpec::Polynomial(defaults.private),
            emergency: RateSpec::Polynomial(defaults.emergency),
            companion: RateSpec::Polynomial(defaults.companion),
        }
    }
}

impl RatesStep {
    pub fn resolve(&self) -> Result<AttributeRates, ConfigError> {
        let field = |name: &'static str, spec: &RateSpec| {
            spec.resolve().map_err(|e| ConfigError::Invalid {
                field: name,
                reason: e.to_string(),
            })
        };
        Ok(AttributeRates {
            female: field("rates.female", &self.female)?,
            private: field("rates.private", &self.private)?,
            emergency: field("rates.emergency", &self.emergency)?,
            companion: field("rates.companion", &self.companion)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateStep {
    pub instance_count: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

impl Default for GenerateStep {
    fn default() -> Self {
        Self {
            instance_count: 1,
            output_dir: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("invalid rooms: {0}")]
    Ward(#[from] FeasibilityError),
    #[error("invalid distributions: {0}")]
    Distribution(#[from] DistributionError),
}

impl GeneratorConfig {
    /// A small ward with every other setting at its default.
    pub fn example() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            start: StartStep {
                horizon: 28,
                target_load: 0.8,
                ensure_feasibility: true,
                combined_age_los: false,
                seed: 1,
            },
            rooms: RoomsStep {
                capacities: vec![1, 2, 2, 2, 4],
            },
            age_los: AgeLosStep::default(),
            lor: LorStep::default(),
            rates: RatesStep::default(),
            generate: GenerateStep::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_str(text)?;
        config.check_fields()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let mut text = serde_json::to_string_pretty(&value).expect("config serializes");
        text.push('\n');
        text
    }

    pub fn ward(&self) -> Result<WardConfig, ConfigError> {
        Ok(WardConfig::from_capacities(&self.rooms.capacities)?)
    }

    pub fn horizon(&self) -> Result<Horizon, ConfigError> {
        Horizon::new(self.start.horizon).map_err(|e| ConfigError::Invalid {
            field: "start.horizon",
            reason: e.to_string(),
        })
    }

    pub fn distribution_choice(&self) -> DistributionChoice {
        DistributionChoice {
            age_los: self.age_los.distribution.clone(),
            lor: self.lor.distribution.clone(),
            age_bounds: self.age_los.age_bounds,
        }
    }

    /// Checks that need no table lookups.
    pub fn check_fields(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::SchemaVersion {
                found: self.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        let load = self.start.target_load;
        if !load.is_finite() || load <= 0.0 || load > 1.0 {
            return Err(ConfigError::Invalid {
                field: "start.target_load",
                reason: format!("{load} is outside (0, 1]"),
            });
        }
        self.horizon()?;
        self.ward()?;
        if self.generate.instance_count == 0 {
            return Err(ConfigError::Invalid {
                field: "generate.instance_count",
                reason: "must be at least 1".into(),
            });
        }
        let joint = matches!(self.age_los.distribution, AgeLosChoice::Joint { .. });
        if joint != self.start.combined_age_los {
            return Err(ConfigError::Invalid {
                field: "start.combined_age_los",
                reason: format!(
                    "is {} but age_los.distribution mode is {}",
                    self.start.combined_age_los,
                    if joint { "joint" } else { "independent" }
                ),
            });
        }
        self.rates.resolve()?;
        Ok(())
    }

    /// SHA-256 over the canonical JSON of every setting that shapes an
    /// instance (the `generate` section is left out).
    pub fn digest(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        value
            .as_object_mut()
            .expect("config is an object")
            .remove("generate");
        hex::encode(Sha256::digest(value.to_string().as_bytes()))
    }
}
