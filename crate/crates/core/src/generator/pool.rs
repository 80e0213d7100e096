use rand::Rng;

use crate::distributions::{AttributeRates, PatientSampler};
use crate::model::{Gender, Patient};

/// A patient whose personal attributes are drawn but whose days are not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolPatient {
    pub id: String,
    pub age: u32,
    pub los: u32,
    pub lor: u32,
    pub gender: Gender,
    pub is_private: bool,
    pub is_emergency: bool,
    pub has_companion: bool,
}

impl PoolPatient {
    /// The patient admitted on `day`.
    pub fn admit(&self, day: i64) -> Patient {
        Patient {
            id: self.id.clone(),
            registration_day: day - i64::from(self.lor),
            admission_day: day,
            discharge_day: day + i64::from(self.los),
            age: self.age,
            gender: self.gender,
            is_private: self.is_private,
            is_emergency: self.is_emergency,
            has_companion: self.has_companion,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatientPool {
    pub patients: Vec<PoolPatient>,
}

impl PatientPool {
    pub fn len(&self) -> usize {
        self.patients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patients.is_empty()
    }
}

/// `2·⌈ℓ·T·Σc / mean_LOS⌉`.
///
/// Quotients within `1e-9` (relative) of an integer are taken as that
/// integer, so binary rounding in `ℓ` cannot add a spurious unit.
pub fn pool_size(target_load: f64, horizon: u32, total_capacity: u64, mean_los: f64) -> usize {
    let quotient = target_load * f64::from(horizon) * total_capacity as f64 / mean_los;
    let nearest = quotient.round();
    let ceiling = if (quotient - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        quotient.ceil()
    };
    2 * ceiling as usize
}

fn bernoulli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> bool {
    rng.random::<f64>() < p
}

/// Draws `size` patients: age and LOS first, then gender, private,
/// companion and emergency from their age-dependent rates, then LOR (zero
/// for emergencies).
pub fn build_pool<R: Rng + ?Sized>(
    size: usize,
    sampler: &PatientSampler,
    rates: &AttributeRates,
    rng: &mut R,
) -> PatientPool {
    let patients = (0..size)
        .map(|index| {
            let age = sampler.sample_age(rng);
            let los = sampler.sample_los(age, rng);
            let gender = if bernoulli(rates.female.rate_at(age), rng) {
                Gender::Female
            } else {
                Gender::Male
            };
            let is_private = bernoulli(rates.private.rate_at(age), rng);
            let has_companion = bernoulli(rates.companion.rate_at(age), rng);
            let is_emergency = bernoulli(rates.emergency.rate_at(age), rng);
            let lor = sampler.sample_lor(is_emergency, rng);
            PoolPatient {
                id: format!("p{index}"),
                age,
                los,
                lor,
                gender,
                is_private,
                is_emergency,
                has_companion,
            }
        })
        .collect();
    PatientPool { patients }
}
