//! Server-side state of one pass through the six wizard steps.

use serde::Serialize;
use serde_json::Value;
use wardgen_core::distributions::AgeLosChoice;
use wardgen_core::distributions::{DistributionChoice, PatientSampler, TableStore};
use wardgen_core::feasibility::{classify, WardConfig};
use wardgen_core::generator::{
    AgeLosStep, GenerateStep, GeneratorConfig, LorStep, RatesStep, RoomsStep, StartStep,
};
use wardgen_core::model::SCHEMA_VERSION;

use crate::{MAX_HORIZON, MAX_INSTANCES};

pub const STEP_COUNT: usize = 6;

pub const STEP_NAMES: [&str; STEP_COUNT] =
    ["start", "rooms", "age_los", "lor", "rates", "generate"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "state", content = "reason", rename_all = "snake_case")]
pub enum StepStatus {
    Pending,
    Valid,
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error("there is no step {0}")]
    NoSuchStep(usize),
    #[error("step {step} is locked until step {current} validates")]
    Locked { step: usize, current: usize },
    #[error("malformed step {step}: {reason}")]
    Malformed { step: usize, reason: String },
    #[error("step {0} has not been validated")]
    Incomplete(usize),
}

#[derive(Debug, Clone, Default, Serialize)]
struct Steps {
    start: Option<StartStep>,
    rooms: Option<RoomsStep>,
    age_los: Option<AgeLosStep>,
    lor: Option<LorStep>,
    rates: Option<RatesStep>,
    generate: Option<GenerateStep>,
}

/// A partial configuration filled step by step. Step `k` opens once steps
/// `1..k` validate; submitting step `k` resets the validation of later steps.
#[derive(Debug, Clone, Serialize)]
pub struct WizardSession {
    pub id: String,
    steps: Steps,
    status: [StepStatus; STEP_COUNT],
}

fn parse<T: serde::de::DeserializeOwned>(step: usize, value: Value) -> Result<T, SessionError> {
    serde_json::from_value(value).map_err(|e| SessionError::Malformed {
        step,
        reason: e.to_string(),
    })
}

fn status_of(result: Result<(), String>) -> StepStatus {
    match result {
        Ok(()) => StepStatus::Valid,
        Err(reason) => StepStatus::Invalid(reason),
    }
}

impl WizardSession {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            steps: Steps::default(),
            status: std::array::from_fn(|_| StepStatus::Pending),
        }
    }

    /// First step, 1-based, that has not validated; `None` once all have.
    pub fn current_step(&self) -> Option<usize> {
        self.status
            .iter()
            .position(|s| *s != StepStatus::Valid)
            .map(|i| i + 1)
    }

    pub fn is_complete(&self) -> bool {
        self.current_step().is_none()
    }

    pub fn status(&self, step: usize) -> Option<&StepStatus> {
        self.status.get(step.checked_sub(1)?)
    }

    /// Stores and validates the body of `step`.
    pub fn submit(
        &mut self,
        step: usize,
        body: Value,
        store: &TableStore,
    ) -> Result<&StepStatus, SessionError> {
        if !(1..=STEP_COUNT).contains(&step) {
            return Err(SessionError::NoSuchStep(step));
        }
        let current = self.current_step().unwrap_or(STEP_COUNT);
        if step > current {
            return Err(SessionError::Locked { step, current });
        }
        let result = match step {
            1 => {
                let start: StartStep = parse(step, body)?;
                let result = check_start(&start);
                self.steps.start = Some(start);
                result
            }
            2 => {
                let rooms: RoomsStep = parse(step, body)?;
                let result = self.check_rooms(&rooms);
                self.steps.rooms = Some(rooms);
                result
            }
            3 => {
                let age_los: AgeLosStep = parse(step, body)?;
                let result = self.check_age_los(&age_los, store);
                self.steps.age_los = Some(age_los);
                result
            }
            4 => {
                let lor: LorStep = parse(step, body)?;
                let result = self.check_lor(&lor, store);
                self.steps.lor = Some(lor);
                result
            }
            5 => {
                let rates: RatesStep = parse(step, body)?;
                let result = rates.resolve().map(|_| ()).map_err(|e| e.to_string());
                self.steps.rates = Some(rates);
                result
            }
            _ => {
                let generate: GenerateStep = parse(step, body)?;
                let result = if (1..=MAX_INSTANCES).contains(&generate.instance_count) {
                    Ok(())
                } else {
                    Err(format!("instance_count must be in 1..={MAX_INSTANCES}"))
                };
                self.steps.generate = Some(generate);
                result
            }
        };
        self.status[step - 1] = status_of(result);
        for later in &mut self.status[step..] {
            *later = StepStatus::Pending;
        }
        Ok(&self.status[step - 1])
    }

    fn check_rooms(&self, rooms: &RoomsStep) -> Result<(), String> {
        let ward = WardConfig::from_capacities(&rooms.capacities).map_err(|e| e.to_string())?;
        let ensure = self
            .steps
            .start
            .as_ref()
            .is_some_and(|s| s.ensure_feasibility);
        let family = classify(&ward);
        if ensure && !family.is_polynomial() {
            return Err(format!(
                "ward {ward} has no closed-form feasibility rule; change the rooms or turn off ensure_feasibility"
            ));
        }
        Ok(())
    }

    fn check_age_los(&self, age_los: &AgeLosStep, store: &TableStore) -> Result<(), String> {
        let combined = self
            .steps
            .start
            .as_ref()
            .is_some_and(|s| s.combined_age_los);
        let joint = matches!(age_los.distribution, AgeLosChoice::Joint { .. });
        if combined != joint {
            return Err(format!(
                "the start step asks for {} age and LOS",
                if combined { "combined" } else { "independent" }
            ));
        }
        let choice = DistributionChoice {
            age_los: age_los.distribution.clone(),
            age_bounds: age_los.age_bounds,
            ..DistributionChoice::default()
        };
        PatientSampler::new(&choice, store)
            .map(|_| ())
            .map_err(|e| e.to_string())
    }

    fn check_lor(&self, lor: &LorStep, store: &TableStore) -> Result<(), String> {
        let age_los = self.steps.age_los.clone().unwrap_or_default();
        let choice = DistributionChoice {
            age_los: age_los.distribution,
            lor: lor.distribution.clone(),
            age_bounds: age_los.age_bounds,
        };
        PatientSampler::new(&choice, store)
            .map(|_| ())
            .map_err(|e| e.to_string())
    }

    /// The assembled configuration once every step validates.
    pub fn config(&self) -> Result<GeneratorConfig, SessionError> {
        if let Some(step) = self.current_step() {
            return Err(SessionError::Incomplete(step));
        }
        let s = &self.steps;
        let missing = |step| SessionError::Incomplete(step);
        Ok(GeneratorConfig {
            schema_version: SCHEMA_VERSION,
            start: s.start.clone().ok_or(missing(1))?,
            rooms: s.rooms.clone().ok_or(missing(2))?,
            age_los: s.age_los.clone().ok_or(missing(3))?,
            lor: s.lor.clone().ok_or(missing(4))?,
            rates: s.rates.clone().ok_or(missing(5))?,
            generate: s.generate.clone().ok_or(missing(6))?,
        })
    }

    pub fn view(&self) -> Value {
        let steps = serde_json::to_value(&self.steps).expect("steps serialize");
        let status: Vec<Value> = STEP_NAMES
            .iter()
            .zip(&self.status)
            .enumerate()
            .map(|(i, (name, status))| {
                serde_json::json!({
                    "step": i + 1,
                    "name": name,
                    "status": status,
                    "value": steps[name],
                })
            })
            .collect();
        serde_json::json!({
            "id": self.id,
            "current_step": self.current_step(),
            "complete": self.is_complete(),
            "steps": status,
        })
    }
}

fn check_start(start: &StartStep) -> Result<(), String> {
    if !(1..=MAX_HORIZON).contains(&start.horizon) {
        return Err(format!("horizon must be in 1..={MAX_HORIZON} days"));
    }
    let load = start.target_load;
    if !(load.is_finite() && load > 0.0 && load <= 1.0) {
        return Err(format!("target_load {load} is outside (0, 1]"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn start(ensure: bool) -> Value {
        json!({"horizon": 28, "target_load": 0.8, "ensure_feasibility": ensure})
    }

    fn fill(session: &mut WizardSession, store: &TableStore) {
        let bodies = [
            start(true),
            json!({"capacities": [2, 2, 4]}),
            serde_json::to_value(AgeLosStep::default()).unwrap(),
            serde_json::to_value(LorStep::default()).unwrap(),
            serde_json::to_value(RatesStep::default()).unwrap(),
            json!({"instance_count": 2}),
        ];
        for (i, body) in bodies.into_iter().enumerate() {
            assert_eq!(
                session.submit(i + 1, body, store).unwrap(),
                &StepStatus::Valid,
                "step {}",
                i + 1
            );
        }
    }

    #[test]
    fn steps_open_in_order() {
        let store = TableStore::in_memory();
        let mut session = WizardSession::new("s");
        assert_eq!(session.current_step(), Some(1));
        assert_eq!(
            session.submit(2, json!({"capacities": [2]}), &store),
            Err(SessionError::Locked {
                step: 2,
                current: 1
            })
        );
        assert!(matches!(
            session.submit(7, json!({}), &store),
            Err(SessionError::NoSuchStep(7))
        ));
        fill(&mut session, &store);
        assert!(session.is_complete());
        let config = session.config().unwrap();
        assert_eq!(config.rooms.capacities, [2, 2, 4]);
        assert!(config.check_fields().is_ok());
    }

    #[test]
    fn editing_a_step_resets_later_ones() {
        let store = TableStore::in_memory();
        let mut session = WizardSession::new("s");
        fill(&mut session, &store);
        session.submit(1, start(false), &store).unwrap();
        assert_eq!(session.current_step(), Some(2));
        assert!((2..=6).all(|k| session.status(k) == Some(&StepStatus::Pending)));
        assert!(matches!(session.config(), Err(SessionError::Incomplete(2))));
    }

    #[test]
    fn ensure_gates_the_rooms_step() {
        let store = TableStore::in_memory();
        let mut session = WizardSession::new("s");
        session.submit(1, start(true), &store).unwrap();
        let status = session
            .submit(2, json!({"capacities": [3, 5, 7, 11]}), &store)
            .unwrap();
        assert!(matches!(status, StepStatus::Invalid(_)));
        assert_eq!(session.current_step(), Some(2));

        session.submit(1, start(false), &store).unwrap();
        let status = session
            .submit(2, json!({"capacities": [3, 5, 7, 11]}), &store)
            .unwrap();
        assert_eq!(status, &StepStatus::Valid);
    }

    #[test]
    fn invalid_and_malformed_bodies() {
        let store = TableStore::in_memory();
        let mut session = WizardSession::new("s");
        let status = session
            .submit(1, json!({"horizon": 0, "target_load": 0.5}), &store)
            .unwrap()
            .clone();
        assert!(matches!(status, StepStatus::Invalid(_)));
        assert!(matches!(
            session.submit(
                1,
                json!({"horizon": 3, "target_load": 0.5, "typo": 1}),
                &store
            ),
            Err(SessionError::Malformed { step: 1, .. })
        ));
        let view = session.view();
        assert_eq!(view["current_step"], 1);
        assert_eq!(view["steps"][0]["status"]["state"], "invalid");
    }
}
