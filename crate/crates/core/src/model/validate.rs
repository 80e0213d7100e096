use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::Instance;

/// A broken instance rule. `patient` is `None` for instance-level rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub patient: Option<String>,
    pub rule: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.patient {
            Some(id) => write!(f, "[{}] patient {id}: {}", self.rule, self.message),
            None => write!(f, "[{}] {}", self.rule, self.message),
        }
    }
}

pub const RULE_ID_UNIQUE: &str = "id-unique";
pub const RULE_ID_NONEMPTY: &str = "id-nonempty";
pub const RULE_LOS_POSITIVE: &str = "los-positive";
pub const RULE_LOR_NONNEGATIVE: &str = "lor-nonnegative";
pub const RULE_EMERGENCY_LOR: &str = "emergency-lor";
pub const RULE_ADMISSION_IN_HORIZON: &str = "admission-in-horizon";

/// Every broken patient or instance rule; empty for a valid instance.
pub fn validate(instance: &Instance) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut push = |patient: &str, rule, message: String| {
        violations.push(Violation {
            patient: Some(patient.to_string()),
            rule,
            message,
        })
    };

    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for p in &instance.patients {
        *seen.entry(p.id.as_str()).or_default() += 1;
        if p.id.trim().is_empty() {
            push(&p.id, RULE_ID_NONEMPTY, "id is empty".into());
        }
        if p.los() < 1 {
            push(
                &p.id,
                RULE_LOS_POSITIVE,
                format!(
                    "discharge day {} is not after admission day {}",
                    p.discharge_day, p.admission_day
                ),
            );
        }
        if p.lor() < 0 {
            push(
                &p.id,
                RULE_LOR_NONNEGATIVE,
                format!(
                    "registration day {} is after admission day {}",
                    p.registration_day, p.admission_day
                ),
            );
        }
        if p.is_emergency && p.lor() != 0 {
            push(
                &p.id,
                RULE_EMERGENCY_LOR,
                format!(
                    "emergency patient registered {} days before admission",
                    p.lor()
                ),
            );
        }
        if !instance.horizon.contains(p.admission_day) {
            push(
                &p.id,
                RULE_ADMISSION_IN_HORIZON,
                format!(
                    "admission day {} outside 1..={}",
                    p.admission_day, instance.horizon.days
                ),
            );
        }
    }
    for (id, count) in seen.into_iter().filter(|&(_, n)| n > 1) {
        push(id, RULE_ID_UNIQUE, format!("id used by {count} patients"));
    }
    violations
}
