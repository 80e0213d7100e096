//! Instance data model: patients on a ward over a planning horizon.
//!
//! Days are numbered `1..=T`. A patient is present on day `t` when
//! `admission_day ≤ t < discharge_day`; stays may run past `T`.

mod json;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::feasibility::{Census, FeasibilityError, WardConfig};

pub use json::{parse_instance, SCHEMA_VERSION};
pub use validate::{
    validate, Violation, RULE_ADMISSION_IN_HORIZON, RULE_EMERGENCY_LOR, RULE_ID_NONEMPTY,
    RULE_ID_UNIQUE, RULE_LOR_NONNEGATIVE, RULE_LOS_POSITIVE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Female,
    Male,
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gender::Female => "female",
            Gender::Male => "male",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Patient {
    pub id: String,
    pub registration_day: i64,
    pub admission_day: i64,
    pub discharge_day: i64,
    pub age: u32,
    pub gender: Gender,
    pub is_private: bool,
    pub is_emergency: bool,
    pub has_companion: bool,
}

impl Patient {
    /// Length of registration: days between registration and admission.
    pub fn lor(&self) -> i64 {
        self.admission_day - self.registration_day
    }

    /// Length of stay in days.
    pub fn los(&self) -> i64 {
        self.discharge_day - self.admission_day
    }

    pub fn is_present(&self, day: i64) -> bool {
        self.admission_day <= day && day < self.discharge_day
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Horizon {
    pub days: u32,
}

impl Horizon {
    pub fn new(days: u32) -> Result<Self, ModelError> {
        if days == 0 {
            return Err(ModelError::Schema(
                "horizon must have at least one day".into(),
            ));
        }
        Ok(Self { days })
    }

    pub fn contains(&self, day: i64) -> bool {
        (1..=i64::from(self.days)).contains(&day)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub seed: Option<u64>,
    pub generated_at: Option<String>,
    pub config_digest: Option<String>,
    /// Position of the instance within its generation batch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_index: Option<u32>,
    /// Fields this version does not know about, kept verbatim.
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub ward: WardConfig,
    pub horizon: Horizon,
    pub patients: Vec<Patient>,
    pub meta: InstanceMeta,
}

/// Per-day load `ℓ_t = |P(t)| / Σc` and its mean over the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadFactor {
    pub per_day: Vec<f64>,
    pub overall: f64,
}

impl Instance {
    pub fn new(ward: WardConfig, horizon: Horizon) -> Self {
        Self {
            ward,
            horizon,
            patients: Vec::new(),
            meta: InstanceMeta::default(),
        }
    }

    pub fn census_of(&self, day: u32) -> Result<Census, ModelError> {
        if !self.horizon.contains(i64::from(day)) {
            return Err(ModelError::OutOfHorizon {
                day: i64::from(day),
                days: self.horizon.days,
            });
        }
        let mut census = Census::default();
        for p in self
            .patients
            .iter()
            .filter(|p| p.is_present(i64::from(day)))
        {
            match p.gender {
                Gender::Female => census.females += 1,
                Gender::Male => census.males += 1,
            }
        }
        Ok(census)
    }

    /// Census for each day `1..=T`, in order.
    pub fn daily_census(&self) -> Vec<Census> {
        let days = self.horizon.days as usize;
        // difference arrays over day indices 1..=T+1
        let mut delta = vec![(0i64, 0i64); days + 2];
        for p in &self.patients {
            let start = p.admission_day.max(1);
            let end = p.discharge_day.min(i64::from(self.horizon.days) + 1);
            if start >= end {
                continue;
            }
            let (s, e) = (start as usize, end as usize);
            match p.gender {
                Gender::Female => {
                    delta[s].0 += 1;
                    delta[e].0 -= 1;
                }
                Gender::Male => {
                    delta[s].1 += 1;
                    delta[e].1 -= 1;
                }
            }
        }
        let (mut f, mut m) = (0i64, 0i64);
        (1..=days)
            .map(|t| {
                f += delta[t].0;
                m += delta[t].1;
                Census::new(f as u32, m as u32)
            })
            .collect()
    }

    pub fn load_factor(&self) -> LoadFactor {
        let capacity = self.ward.total_capacity() as f64;
        let per_day: Vec<f64> = self
            .daily_census()
            .iter()
            .map(|c| c.total() as f64 / capacity)
            .collect();
        let overall = per_day.iter().sum::<f64>() / per_day.len() as f64;
        LoadFactor { per_day, overall }
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate(self)
    }

    pub fn to_json(&self) -> String {
        json::to_json(self)
    }

    /// Parses an instance; warnings about preserved unknown fields are
    /// logged.
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        parse_instance(text).map(|(instance, _)| instance)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unsupported schema_version {found} (expected {expected})")]
    SchemaVersion { found: String, expected: u32 },
    #[error("invalid ward: {0}")]
    Ward(#[from] FeasibilityError),
    #[error("day {day} is outside the horizon 1..={days}")]
    OutOfHorizon { day: i64, days: u32 },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn patient(id: &str, gender: Gender, admission: i64, discharge: i64) -> Patient {
        Patient {
            id: id.into(),
            registration_day: admission,
            admission_day: admission,
            discharge_day: discharge,
            age: 50,
            gender,
            is_private: false,
            is_emergency: false,
            has_companion: false,
        }
    }

    fn instance(caps: &[u32], days: u32, patients: Vec<Patient>) -> Instance {
        Instance {
            patients,
            ..Instance::new(
                WardConfig::from_capacities(caps).unwrap(),
                Horizon::new(days).unwrap(),
            )
        }
    }

    #[test]
    fn census_examples() {
        let empty = instance(&[2], 5, vec![]);
        assert_eq!(empty.census_of(1).unwrap(), Census::new(0, 0));

        let one = instance(&[2], 5, vec![patient("a", Gender::Female, 2, 4)]);
        assert_eq!(one.census_of(2).unwrap(), Census::new(1, 0));
        assert_eq!(one.census_of(4).unwrap(), Census::new(0, 0));

        let two = instance(
            &[2],
            5,
            vec![
                patient("a", Gender::Male, 1, 3),
                patient("b", Gender::Male, 1, 3),
            ],
        );
        assert_eq!(two.census_of(2).unwrap(), Census::new(0, 2));
        assert!(matches!(
            two.census_of(0),
            Err(ModelError::OutOfHorizon { .. })
        ));
        assert!(two.census_of(6).is_err());
    }

    #[test]
    fn daily_census_matches_direct_count() {
        let inst = instance(
            &[2, 2],
            6,
            vec![
                patient("a", Gender::Female, 1, 9),
                patient("b", Gender::Male, 3, 4),
                patient("c", Gender::Female, 6, 7),
                patient("d", Gender::Male, 2, 2),
            ],
        );
        let daily = inst.daily_census();
        for t in 1..=6 {
            assert_eq!(daily[t as usize - 1], inst.census_of(t).unwrap());
        }
    }

    #[test]
    fn load_factor_examples() {
        let empty = instance(&[2, 2], 5, vec![]);
        let lf = empty.load_factor();
        assert_eq!(lf.per_day, vec![0.0; 5]);
        assert_eq!(lf.overall, 0.0);

        let single = instance(&[4], 4, vec![patient("a", Gender::Male, 1, 5)]);
        assert_eq!(single.load_factor().overall, 0.25);

        let full = instance(
            &[1, 1],
            3,
            vec![
                patient("a", Gender::Male, 1, 4),
                patient("b", Gender::Female, 1, 10),
            ],
        );
        assert_eq!(full.load_factor().overall, 1.0);
    }

    #[test]
    fn horizon_rejects_zero() {
        assert!(Horizon::new(0).is_err());
        assert!(Horizon::new(1).unwrap().contains(1));
    }
}
