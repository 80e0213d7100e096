use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::lognormal::{LogNormalSampler, LogNormalSpec};
use super::placeholders::builtin_table;
use super::table::{
    warn_on_zero_los, DiscreteSampler, EmpiricalTable, JointSampler, TableKind, DEFAULT_AGE_RANGE,
};
use super::DistributionError;

/// Distribution of one integer-valued patient quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistSpec {
    /// Every integer in `low..=high` equally likely.
    Uniform {
        low: u32,
        high: u32,
    },
    LogNormal(LogNormalSpec),
    /// A built-in placeholder id or a path to a table file.
    Empirical {
        table: String,
    },
}

/// Age and LOS either drawn independently or together from a joint table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum AgeLosChoice {
    Independent { age: DistSpec, los: DistSpec },
    Joint { table: String },
}

impl Default for AgeLosChoice {
    fn default() -> Self {
        AgeLosChoice::Independent {
            age: DistSpec::LogNormal(LogNormalSpec::default_age()),
            los: DistSpec::LogNormal(LogNormalSpec::default_los()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgeBounds {
    pub min_age: u32,
    pub max_age: u32,
}

impl Default for AgeBounds {
    fn default() -> Self {
        Self {
            min_age: DEFAULT_AGE_RANGE.0,
            max_age: DEFAULT_AGE_RANGE.1,
        }
    }
}

/// Everything needed to draw age, LOS and LOR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionChoice {
    #[serde(default)]
    pub age_los: AgeLosChoice,
    #[serde(default = "default_lor")]
    pub lor: DistSpec,
    #[serde(default)]
    pub age_bounds: AgeBounds,
}

fn default_lor() -> DistSpec {
    DistSpec::LogNormal(LogNormalSpec::default_lor())
}

impl Default for DistributionChoice {
    fn default() -> Self {
        Self {
            age_los: AgeLosChoice::default(),
            lor: default_lor(),
            age_bounds: AgeBounds::default(),
        }
    }
}

/// Resolves table ids: explicitly registered tables first, then the bundled
/// placeholders, then files (relative paths against `base_dir`).
#[derive(Debug, Clone, Default)]
pub struct TableStore {
    base_dir: Option<PathBuf>,
    no_files: bool,
    registered: BTreeMap<String, Arc<EmpiricalTable>>,
}

impl TableStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_base_dir(dir: impl Into<PathBuf>) -> Self {
        Self {
            base_dir: Some(dir.into()),
            ..Self::default()
        }
    }

    /// A store that never reads table files.
    pub fn in_memory() -> Self {
        Self {
            no_files: true,
            ..Self::default()
        }
    }

    /// Ids of the registered tables, sorted.
    pub fn registered_ids(&self) -> impl Iterator<Item = &str> {
        self.registered.keys().map(String::as_str)
    }

    pub fn register(&mut self, id: impl Into<String>, table: EmpiricalTable) {
        self.registered.insert(id.into(), Arc::new(table));
    }

    pub fn resolve(&self, id: &str) -> Result<Arc<EmpiricalTable>, DistributionError> {
        if let Some(table) = self.registered.get(id) {
            return Ok(Arc::clone(table));
        }
        if let Some(table) = builtin_table(id) {
            return Ok(Arc::new(table));
        }
        if self.no_files {
            return Err(DistributionError::UnknownTable(id.to_string()));
        }
        let path = Path::new(id);
        let path = match &self.base_dir {
            Some(base) if path.is_relative() => base.join(path),
            _ => path.to_path_buf(),
        };
        if !path.is_file() {
            return Err(DistributionError::UnknownTable(id.to_string()));
        }
        Ok(Arc::new(EmpiricalTable::load(&path)?))
    }

    fn resolve_kind(
        &self,
        id: &str,
        kind: TableKind,
    ) -> Result<Arc<EmpiricalTable>, DistributionError> {
        let table = self.resolve(id)?;
        if table.kind() != kind {
            return Err(DistributionError::KindMismatch {
                expected: kind,
                found: table.kind(),
            });
        }
        Ok(table)
    }
}

#[derive(Debug, Clone)]
enum IntegerSampler {
    Uniform {
        low: u32,
        high: u32,
    },
    LogNormal {
        sampler: LogNormalSampler,
        lo: i64,
        hi: i64,
    },
    Table(DiscreteSampler),
}

impl IntegerSampler {
    /// Sampler restricted to `[lo, hi]`.
    fn new(
        spec: &DistSpec,
        lo: u32,
        hi: u32,
        what: &str,
        table: impl FnOnce(&str) -> Result<Option<DiscreteSampler>, DistributionError>,
    ) -> Result<Self, DistributionError> {
        match spec {
            DistSpec::Uniform { low, high } => {
                if low > high {
                    return Err(DistributionError::InvalidParameters(format!(
                        "{what}: uniform low {low} exceeds high {high}"
                    )));
                }
                let (low, high) = ((*low).max(lo), (*high).min(hi));
                if low > high {
                    return Err(DistributionError::InvalidParameters(format!(
                        "{what}: uniform range lies outside {lo}..={hi}"
                    )));
                }
                Ok(IntegerSampler::Uniform { low, high })
            }
            DistSpec::LogNormal(spec) => Ok(IntegerSampler::LogNormal {
                sampler: LogNormalSampler::new(*spec)?,
                lo: i64::from(lo),
                hi: i64::from(hi),
            }),
            DistSpec::Empirical { table: id } => match table(id)? {
                Some(sampler) => Ok(IntegerSampler::Table(sampler)),
                None => Err(DistributionError::Unsupported(format!(
                    "{what} cannot use an empirical table"
                ))),
            },
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match self {
            IntegerSampler::Uniform { low, high } => rng.random_range(*low..=*high),
            IntegerSampler::LogNormal { sampler, lo, hi } => {
                sampler.sample_integer(rng, *lo, *hi) as u32
            }
            IntegerSampler::Table(sampler) => sampler.sample(rng),
        }
    }
}

const MAX_LOS: u32 = 10_000;
const MAX_LOR: u32 = 10_000;

#[derive(Debug)]
enum AgeLosSampler {
    Independent {
        age: IntegerSampler,
        los: IntegerSampler,
    },
    Joint(JointSampler),
}

/// Prepared samplers for a [`DistributionChoice`], tables resolved.
#[derive(Debug)]
pub struct PatientSampler {
    age_los: AgeLosSampler,
    lor: IntegerSampler,
    mean_los: f64,
}

impl PatientSampler {
    pub fn new(choice: &DistributionChoice, store: &TableStore) -> Result<Self, DistributionError> {
        let AgeBounds { min_age, max_age } = choice.age_bounds;
        if min_age > max_age {
            return Err(DistributionError::InvalidParameters(format!(
                "min_age {min_age} exceeds max_age {max_age}"
            )));
        }
        let (age_los, mean_los) = match &choice.age_los {
            AgeLosChoice::Independent { age, los } => {
                let age = IntegerSampler::new(age, min_age, max_age, "age", |id| {
                    let table = store.resolve_kind(id, TableKind::Age)?;
                    let in_bounds = table
                        .age_marginal()
                        .into_iter()
                        .filter(|&(a, _)| (min_age..=max_age).contains(&a));
                    DiscreteSampler::new(in_bounds).map(Some)
                })?;
                let mut table_mean = None;
                let los_sampler = IntegerSampler::new(los, 1, MAX_LOS, "los", |id| {
                    let table = store.resolve_kind(id, TableKind::Los)?;
                    warn_on_zero_los(&table);
                    table_mean = Some(table.mean_los()?);
                    DiscreteSampler::new(table.los_marginal()).map(Some)
                })?;
                let mean = match (&los_sampler, table_mean) {
                    (_, Some(mean)) => mean,
                    (IntegerSampler::Uniform { low, high }, _) => {
                        (f64::from(*low) + f64::from(*high)) / 2.0
                    }
                    (IntegerSampler::LogNormal { sampler, .. }, _) => sampler.spec().mean,
                    (IntegerSampler::Table(sampler), None) => sampler.mean(),
                };
                (
                    AgeLosSampler::Independent {
                        age,
                        los: los_sampler,
                    },
                    mean,
                )
            }
            AgeLosChoice::Joint { table } => {
                let table = store.resolve_kind(table, TableKind::Joint)?;
                let sampler = JointSampler::new(&table, (min_age, max_age))?;
                let mean = sampler.mean_los();
                (AgeLosSampler::Joint(sampler), mean)
            }
        };
        let lor = IntegerSampler::new(&choice.lor, 0, MAX_LOR, "lor", |_| Ok(None))?;
        Ok(Self {
            age_los,
            lor,
            mean_los,
        })
    }

    /// Age in `[min_age, max_age]`.
    pub fn sample_age<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match &self.age_los {
            AgeLosSampler::Independent { age, .. } => age.sample(rng),
            AgeLosSampler::Joint(joint) => joint.sample_age(rng),
        }
    }

    /// LOS ≥ 1; `age` only matters for joint tables.
    pub fn sample_los<R: Rng + ?Sized>(&self, age: u32, rng: &mut R) -> u32 {
        match &self.age_los {
            AgeLosSampler::Independent { los, .. } => los.sample(rng),
            AgeLosSampler::Joint(joint) => joint.sample_los(age, rng),
        }
    }

    /// LOR ≥ 0, or 0 for emergencies without consuming randomness.
    pub fn sample_lor<R: Rng + ?Sized>(&self, is_emergency: bool, rng: &mut R) -> u32 {
        if is_emergency {
            0
        } else {
            self.lor.sample(rng)
        }
    }

    /// Mean LOS of the configured distribution: the configured mean for
    /// log-normals, the midpoint for uniforms and the weighted mean over
    /// LOS ≥ 1 for tables.
    pub fn mean_los(&self) -> f64 {
        self.mean_los
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn independent(age: DistSpec, los: DistSpec, lor: DistSpec) -> DistributionChoice {
        DistributionChoice {
            age_los: AgeLosChoice::Independent { age, los },
            lor,
            age_bounds: AgeBounds::default(),
        }
    }

    fn uniform(low: u32, high: u32) -> DistSpec {
        DistSpec::Uniform { low, high }
    }

    #[test]
    fn point_masses() {
        let choice = independent(uniform(30, 30), uniform(3, 3), uniform(2, 2));
        let s = PatientSampler::new(&choice, &TableStore::new()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(s.sample_age(&mut rng), 30);
            assert_eq!(s.sample_los(30, &mut rng), 3);
            assert_eq!(s.sample_lor(false, &mut rng), 2);
            assert_eq!(s.sample_lor(true, &mut rng), 0);
        }
        assert_eq!(s.mean_los(), 3.0);
    }

    #[test]
    fn default_means() {
        let s = PatientSampler::new(&DistributionChoice::default(), &TableStore::new()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let ages: Vec<u32> = (0..n).map(|_| s.sample_age(&mut rng)).collect();
        let los: Vec<u32> = (0..n).map(|_| s.sample_los(50, &mut rng)).collect();
        let lor: Vec<u32> = (0..n).map(|_| s.sample_lor(false, &mut rng)).collect();
        let mean = |v: &[u32]| v.iter().map(|&x| f64::from(x)).sum::<f64>() / v.len() as f64;
        assert!((59.0..=64.0).contains(&mean(&ages)), "{}", mean(&ages));
        assert!((3.6..=4.5).contains(&mean(&los)), "{}", mean(&los));
        assert!((5.5..=6.8).contains(&mean(&lor)), "{}", mean(&lor));
        assert!(ages.iter().all(|a| (18..=100).contains(a)));
        assert!(los.iter().all(|&l| l >= 1));
        assert_eq!(s.mean_los(), LogNormalSpec::LOS_MEAN);
    }

    #[test]
    fn uniform_mean_los() {
        let choice = independent(uniform(30, 40), uniform(2, 6), uniform(0, 0));
        let s = PatientSampler::new(&choice, &TableStore::new()).unwrap();
        assert_eq!(s.mean_los(), 4.0);
    }

    #[test]
    fn invalid_choices() {
        let store = TableStore::new();
        let bad = [
            independent(uniform(40, 30), uniform(1, 2), uniform(0, 1)),
            independent(uniform(5, 10), uniform(1, 2), uniform(0, 1)),
            independent(uniform(30, 40), uniform(0, 0), uniform(0, 1)),
            independent(
                uniform(30, 40),
                uniform(1, 2),
                DistSpec::Empirical {
                    table: "placeholder-los-1".into(),
                },
            ),
            independent(
                DistSpec::Empirical {
                    table: "placeholder-los-1".into(),
                },
                uniform(1, 2),
                uniform(0, 1),
            ),
            independent(
                DistSpec::Empirical {
                    table: "no-such-table".into(),
                },
                uniform(1, 2),
                uniform(0, 1),
            ),
        ];
        for choice in bad {
            assert!(PatientSampler::new(&choice, &store).is_err(), "{choice:?}");
        }
    }

    #[test]
    fn registered_and_file_tables() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("los.txt"), "kind = los\n3, 0.5\n5, 0.5\n").unwrap();
        let mut store = TableStore::with_base_dir(dir.path());
        store.register(
            "single-age",
            EmpiricalTable::parse("kind = age\n50, 1\n").unwrap(),
        );
        let choice = independent(
            DistSpec::Empirical {
                table: "single-age".into(),
            },
            DistSpec::Empirical {
                table: "los.txt".into(),
            },
            uniform(1, 1),
        );
        let s = PatientSampler::new(&choice, &store).unwrap();
        assert_eq!(s.mean_los(), 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            assert_eq!(s.sample_age(&mut rng), 50);
            assert!([3, 5].contains(&s.sample_los(50, &mut rng)));
        }
        assert_eq!(store.registered_ids().collect::<Vec<_>>(), ["single-age"]);

        let path = dir.path().join("los.txt");
        let path = path.to_str().unwrap();
        assert!(TableStore::new().resolve(path).is_ok());
        assert!(matches!(
            TableStore::in_memory().resolve(path),
            Err(DistributionError::UnknownTable(_))
        ));
        assert!(TableStore::in_memory().resolve("placeholder-los-1").is_ok());
    }

    #[test]
    fn joint_placeholder() {
        let choice = DistributionChoice {
            age_los: AgeLosChoice::Joint {
                table: "placeholder-joint-2".into(),
            },
            ..DistributionChoice::default()
        };
        let s = PatientSampler::new(&choice, &TableStore::new()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..1000 {
            let age = s.sample_age(&mut rng);
            assert!((18..=100).contains(&age));
            let los = s.sample_los(age, &mut rng);
            assert!((1..=24).contains(&los));
        }
        assert!(s.mean_los() > 1.0);
    }

    #[test]
    fn serde_shapes() {
        let choice = DistributionChoice::default();
        let text = serde_json::to_string(&choice).unwrap();
        assert!(text.contains(r#""mode":"independent""#));
        assert!(text.contains(r#""kind":"log_normal""#));
        assert_eq!(
            serde_json::from_str::<DistributionChoice>(&text).unwrap(),
            choice
        );
        let joint: DistributionChoice =
            serde_json::from_str(r#"{"age_los":{"mode":"joint","table":"placeholder-joint-1"}}"#)
                .unwrap();
        assert_eq!(joint.lor, default_lor());
        assert!(serde_json::from_str::<DistributionChoice>(r#"{"colour":1}"#).is_err());
        let spec: DistSpec =
            serde_json::from_str(r#"{"kind":"log_normal","mean":3,"std_dev":1}"#).unwrap();
        assert_eq!(
            spec,
            DistSpec::LogNormal(LogNormalSpec::new(3.0, 1.0).unwrap())
        );
    }
}
