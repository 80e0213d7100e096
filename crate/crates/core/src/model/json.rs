//! Instance JSON format.
//!
//! ```json
//! {
//!   "horizon": {"days": 28},
//!   "meta": {"config_digest": "…", "generated_at": null, "seed": 7},
//!   "patients": [{"admission_day": 1, "age": 63, "discharge_day": 5, …}],
//!   "schema_version": 1,
//!   "ward": [{"capacity": 2, "id": "R1"}, …]
//! }
//! ```
//!
//! Keys are written in lexicographic order. Unknown top-level keys are moved
//! into `meta` on read.

use serde_json::{Map, Value};

use super::{Horizon, Instance, InstanceMeta, ModelError, Patient};
use crate::feasibility::WardConfig;

pub const SCHEMA_VERSION: u32 = 1;

const KNOWN_KEYS: [&str; 5] = ["schema_version", "ward", "horizon", "patients", "meta"];

pub(super) fn to_value(instance: &Instance) -> Value {
    let mut root = Map::new();
    root.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    root.insert(
        "ward".into(),
        serde_json::to_value(&instance.ward).expect("ward serializes"),
    );
    root.insert(
        "horizon".into(),
        serde_json::to_value(instance.horizon).expect("horizon serializes"),
    );
    root.insert(
        "patients".into(),
        serde_json::to_value(&instance.patients).expect("patients serialize"),
    );
    root.insert(
        "meta".into(),
        serde_json::to_value(&instance.meta).expect("meta serializes"),
    );
    Value::Object(root)
}

pub(super) fn to_json(instance: &Instance) -> String {
    // serde_json's default map is ordered, so keys come out sorted
    let mut text = serde_json::to_string_pretty(&to_value(instance)).expect("instance serializes");
    text.push('\n');
    text
}

/// Parses an instance and returns it with one warning per unknown
/// top-level field.
pub fn parse_instance(text: &str) -> Result<(Instance, Vec<String>), ModelError> {
    let value: Value = serde_json::from_str(text)?;
    let Value::Object(mut root) = value else {
        return Err(ModelError::Schema("top level must be an object".into()));
    };

    match root.remove("schema_version") {
        None => return Err(ModelError::Schema("missing 'schema_version'".into())),
        Some(Value::Number(n)) if n.as_u64() == Some(u64::from(SCHEMA_VERSION)) => {}
        Some(other) => {
            return Err(ModelError::SchemaVersion {
                found: other.to_string(),
                expected: SCHEMA_VERSION,
            })
        }
    }

    let mut take = |key: &str| {
        root.remove(key)
            .ok_or_else(|| ModelError::Schema(format!("missing '{key}'")))
    };
    let ward: WardConfig = serde_json::from_value(take("ward")?)
        .map_err(|e| ModelError::Schema(format!("ward: {e}")))?;
    let horizon: Horizon = serde_json::from_value(take("horizon")?)
        .map_err(|e| ModelError::Schema(format!("horizon: {e}")))?;
    let horizon = Horizon::new(horizon.days)?;
    let patients: Vec<Patient> = serde_json::from_value(take("patients")?)
        .map_err(|e| ModelError::Schema(format!("patients: {e}")))?;
    let mut meta: InstanceMeta = match root.remove("meta") {
        None | Some(Value::Null) => InstanceMeta::default(),
        Some(value) => {
            serde_json::from_value(value).map_err(|e| ModelError::Schema(format!("meta: {e}")))?
        }
    };

    let mut warnings = Vec::new();
    for (key, value) in root {
        debug_assert!(!KNOWN_KEYS.contains(&key.as_str()));
        let warning = format!("unknown field '{key}' preserved under meta");
        log::warn!("{warning}");
        warnings.push(warning);
        meta.extra.insert(key, value);
    }

    Ok((
        Instance {
            ward,
            horizon,
            patients,
            meta,
        },
        warnings,
    ))
}
