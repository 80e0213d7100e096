//! Instance generation: a pool of patients with drawn attributes, then a
//! day-by-day selection that admits pool patients up to the target load.

mod config;
mod pool;
mod select;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{
    AttributeRates, DistributionChoice, DistributionError, PatientSampler, TableStore,
};
use crate::feasibility::{classify, subset_sum_oracle, CapacityFamily, WardConfig};
use crate::model::{Horizon, Instance, InstanceMeta};

pub use config::{
    AgeLosStep, ConfigError, GenerateStep, GeneratorConfig, LorStep, RateSpec, RatesStep,
    RoomsStep, StartStep,
};
pub use pool::{build_pool, pool_size, PatientPool, PoolPatient};
pub use select::{select_from_pool, Selection, MIN_DAILY_REJECTIONS};

/// Mean LOS of the configured LOS or joint distribution.
pub fn mean_los_of(
    choice: &DistributionChoice,
    store: &TableStore,
) -> Result<f64, DistributionError> {
    Ok(PatientSampler::new(choice, store)?.mean_los())
}

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of instance `index`: the `index + 1`-th output of a splitmix64
/// stream started at `seed`.
pub fn instance_seed(seed: u64, index: u32) -> u64 {
    mix(seed.wrapping_add((u64::from(index) + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationReport {
    pub index: u32,
    pub seed: u64,
    pub pool_size: usize,
    pub accepted: usize,
    pub remaining: usize,
    pub achieved_load: f64,
    pub target_load: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub instance: Instance,
    pub report: GenerationReport,
}

/// A validated configuration with its tables resolved.
#[derive(Debug)]
pub struct Generator {
    config: GeneratorConfig,
    ward: WardConfig,
    horizon: Horizon,
    sampler: PatientSampler,
    rates: AttributeRates,
    family: CapacityFamily,
    digest: String,
    warnings: Vec<String>,
}

impl Generator {
    pub fn new(config: GeneratorConfig, store: &TableStore) -> Result<Self, ConfigError> {
        config.check_fields()?;
        let ward = config.ward()?;
        let horizon = config.horizon()?;
        let sampler = PatientSampler::new(&config.distribution_choice(), store)?;
        let rates = config.rates.resolve()?;
        let family = classify(&ward);
        let mut warnings = Vec::new();
        if config.start.ensure_feasibility && !family.is_polynomial() {
            let warning = format!(
                "ward {ward} has no closed-form family; feasibility is checked with the subset-sum oracle"
            );
            log::warn!("{warning}");
            warnings.push(warning);
        }
        let digest = config.digest();
        Ok(Self {
            config,
            ward,
            horizon,
            sampler,
            rates,
            family,
            digest,
            warnings,
        })
    }

    pub fn config(&self) -> &GeneratorConfig {
        &self.config
    }

    pub fn ward(&self) -> &WardConfig {
        &self.ward
    }

    pub fn family(&self) -> &CapacityFamily {
        &self.family
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    /// Configuration-level warnings.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn mean_los(&self) -> f64 {
        self.sampler.mean_los()
    }

    pub fn pool_size(&self) -> usize {
        pool_size(
            self.config.start.target_load,
            self.horizon.days,
            self.ward.total_capacity(),
            self.mean_los(),
        )
    }

    pub fn build_pool(&self, rng: &mut ChaCha8Rng) -> PatientPool {
        build_pool(self.pool_size(), &self.sampler, &self.rates, rng)
    }

    /// Instance `index` of the batch.
    pub fn generate_one(&self, index: u32) -> GeneratedInstance {
        let seed = instance_seed(self.config.start.seed, index);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = self.build_pool(&mut rng);
        let pool_size = pool.len();
        let selection = select_from_pool(
            pool,
            &self.ward,
            self.horizon,
            self.config.start.target_load,
            self.config.start.ensure_feasibility,
            &mut rng,
        );
        let instance = Instance {
            ward: self.ward.clone(),
            horizon: self.horizon,
            patients: selection.patients,
            meta: InstanceMeta {
                seed: Some(self.config.start.seed),
                generated_at: None,
                config_digest: Some(self.digest.clone()),
                instance_index: Some(index),
                extra: Default::default(),
            },
        };
        let achieved_load = instance.load_factor().overall;
        for warning in &selection.warnings {
            log::warn!("instance {index}: {warning}");
        }
        let report = GenerationReport {
            index,
            seed,
            pool_size,
            accepted: instance.patients.len(),
            remaining: selection.remaining,
            achieved_load,
            target_load: self.config.start.target_load,
            warnings: selection.warnings,
        };
        GeneratedInstance { instance, report }
    }

    /// Every instance of the batch, generated in parallel, in index order.
    pub fn generate_all(&self) -> Vec<GeneratedInstance> {
        (0..self.config.generate.instance_count)
            .into_par_iter()
            .map(|index| self.generate_one(index))
            .collect()
    }
}

/// Validates `config` and generates its whole batch.
pub fn generate(
    config: &GeneratorConfig,
    store: &TableStore,
) -> Result<Vec<GeneratedInstance>, ConfigError> {
    Ok(Generator::new(config.clone(), store)?.generate_all())
}

/// Days whose census the subset-sum oracle rejects.
pub fn infeasible_days(instance: &Instance) -> Vec<u32> {
    instance
        .daily_census()
        .into_iter()
        .zip(1..)
        .filter(|(census, _)| !subset_sum_oracle(*census, &instance.ward).feasible)
        .map(|(_, day)| day)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{AgeLosChoice, DistSpec, LogNormalSpec};

    fn config(capacities: Vec<u32>, horizon: u32, load: f64, ensure: bool) -> GeneratorConfig {
        let mut config = GeneratorConfig::example();
        config.rooms.capacities = capacities;
        config.start.horizon = horizon;
        config.start.target_load = load;
        config.start.ensure_feasibility = ensure;
        config
    }

    #[test]
    fn mean_los_examples() {
        let store = TableStore::new();
        let mut choice = DistributionChoice::default();
        assert_eq!(
            mean_los_of(&choice, &store).unwrap(),
            LogNormalSpec::LOS_MEAN
        );
        choice.age_los = AgeLosChoice::Independent {
            age: DistSpec::LogNormal(LogNormalSpec::default_age()),
            los: DistSpec::Uniform { low: 2, high: 6 },
        };
        assert_eq!(mean_los_of(&choice, &store).unwrap(), 4.0);
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let seeds: Vec<u64> = (0..100).map(|k| instance_seed(7, k)).collect();
        let mut unique = seeds.clone();
        unique.sort_unstable();
        unique.dedup();
        assert_eq!(unique.len(), 100);
        assert_eq!(instance_seed(7, 3), seeds[3]);
        assert_ne!(instance_seed(8, 0), instance_seed(7, 0));
    }

    #[test]
    fn batch_is_reproducible() {
        let mut c = config(vec![2, 2, 4], 21, 0.8, true);
        c.start.seed = 7;
        c.generate.instance_count = 3;
        let store = TableStore::new();
        let a: Vec<String> = generate(&c, &store)
            .unwrap()
            .iter()
            .map(|g| g.instance.to_json())
            .collect();
        let b: Vec<String> = generate(&c, &store)
            .unwrap()
            .iter()
            .map(|g| g.instance.to_json())
            .collect();
        assert_eq!(a.len(), 3);
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn generated_instances_are_valid_and_feasible() {
        let c = config(vec![1, 2, 3, 3], 28, 0.9, true);
        let store = TableStore::new();
        let g = Generator::new(c, &store).unwrap();
        let out = g.generate_one(0);
        assert!(out.instance.validate().is_empty());
        assert!(infeasible_days(&out.instance).is_empty());
        assert_eq!(
            out.report.accepted + out.report.remaining,
            out.report.pool_size
        );
        assert!(out.report.achieved_load <= 0.9 + 1e-12);
        assert_eq!(out.report.pool_size, g.pool_size());
        assert_eq!(
            g.pool_size(),
            2 * (0.9 * 28.0 * 9.0 / LogNormalSpec::LOS_MEAN).ceil() as usize
        );
    }

    #[test]
    fn oracle_ward_is_allowed_with_warning() {
        let g =
            Generator::new(config(vec![3, 5, 7, 11], 14, 0.7, true), &TableStore::new()).unwrap();
        assert_eq!(g.warnings().len(), 1);
        let out = g.generate_one(0);
        assert!(infeasible_days(&out.instance).is_empty());
    }

    #[test]
    fn invalid_configuration_is_rejected() {
        let mut c = config(vec![2, 2], 14, 0.7, false);
        c.age_los.distribution = AgeLosChoice::Independent {
            age: DistSpec::Empirical {
                table: "missing".into(),
            },
            los: DistSpec::Uniform { low: 1, high: 3 },
        };
        assert!(matches!(
            Generator::new(c, &TableStore::new()),
            Err(ConfigError::Distribution(_))
        ));
        assert!(generate(&config(vec![2], 14, 1.5, false), &TableStore::new()).is_err());
    }
}
