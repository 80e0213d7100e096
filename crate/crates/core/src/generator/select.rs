use std::collections::HashMap;

use rand::Rng;

use super::pool::PatientPool;
use crate::feasibility::{is_feasible, Census, WardConfig};
use crate::model::{Gender, Horizon, Patient};

/// Smallest number of candidate draws allowed per day before moving on.
pub const MIN_DAILY_REJECTIONS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Accepted patients in order of acceptance.
    pub patients: Vec<Patient>,
    /// Patients still in the pool at the end.
    pub remaining: usize,
    pub rejected_for_load: usize,
    pub rejected_for_feasibility: usize,
    pub warnings: Vec<String>,
}

struct FeasibilityMemo<'a> {
    ward: &'a WardConfig,
    known: HashMap<Census, bool>,
}

impl FeasibilityMemo<'_> {
    fn check(&mut self, census: Census) -> bool {
        let ward = self.ward;
        *self
            .known
            .entry(census)
            .or_insert_with(|| is_feasible(census, ward).feasible)
    }
}

/// Day-by-day admission: on day `t` random pool patients are admitted on
/// `t` while the cumulated load stays within `target_load`.
///
/// A candidate is accepted only if, counting every bed-day already
/// committed, `ℓ_{≤s} ≤ target_load` holds for every `s ≥ t` once its whole
/// (horizon-truncated) stay is added, and, with `ensure_feasibility`, every
/// day of that stay keeps a feasible census. Rejected candidates go back
/// into the pool. A day ends when no bed-day is left at `t` or after
/// `max(20, pool / 10)` rejections.
pub fn select_from_pool<R: Rng + ?Sized>(
    pool: PatientPool,
    ward: &WardConfig,
    horizon: Horizon,
    target_load: f64,
    ensure_feasibility: bool,
    rng: &mut R,
) -> Selection {
    let days = horizon.days as usize;
    let capacity = ward.total_capacity() as f64;
    // slack[s]: bed-days still allowed in 1..=s, from ℓ_{≤s} ≤ target
    let mut slack: Vec<i64> = (0..=days)
        .map(|s| (target_load * s as f64 * capacity + 1e-9).floor() as i64)
        .collect();
    let mut females = vec![0u32; days + 1];
    let mut males = vec![0u32; days + 1];
    let mut memo = FeasibilityMemo {
        ward,
        known: HashMap::new(),
    };

    let mut remaining = pool.patients;
    let mut selection = Selection {
        patients: Vec::new(),
        remaining: 0,
        rejected_for_load: 0,
        rejected_for_feasibility: 0,
        warnings: Vec::new(),
    };

    for t in 1..=days {
        if remaining.is_empty() {
            selection
                .warnings
                .push(format!("patient pool exhausted before day {t} of {days}"));
            break;
        }
        let budget = MIN_DAILY_REJECTIONS.max(remaining.len() / 10);
        let mut rejections = 0;
        while rejections < budget && slack[t] >= 1 && !remaining.is_empty() {
            let index = rng.random_range(0..remaining.len());
            let candidate = &remaining[index];
            // stay covers days t..last within the horizon
            let last = (t + candidate.los as usize - 1).min(days);

            let fits_load = (t..=days).all(|s| slack[s] >= (s.min(last) - t + 1) as i64);
            if !fits_load {
                selection.rejected_for_load += 1;
                rejections += 1;
                continue;
            }
            if ensure_feasibility {
                let female = candidate.gender == Gender::Female;
                let fits_ward = (t..=last).all(|s| {
                    let census = if female {
                        Census::new(females[s] + 1, males[s])
                    } else {
                        Census::new(females[s], males[s] + 1)
                    };
                    memo.check(census)
                });
                if !fits_ward {
                    selection.rejected_for_feasibility += 1;
                    rejections += 1;
                    continue;
                }
            }

            let candidate = remaining.swap_remove(index);
            for (s, room) in slack.iter_mut().enumerate().take(days + 1).skip(t) {
                *room -= (s.min(last) - t + 1) as i64;
            }
            let counts = match candidate.gender {
                Gender::Female => &mut females,
                Gender::Male => &mut males,
            };
            for count in &mut counts[t..=last] {
                *count += 1;
            }
            selection.patients.push(candidate.admit(t as i64));
        }
    }
    selection.remaining = remaining.len();
    selection
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::pool::PoolPatient;
    use crate::model::Instance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pool_patient(id: &str, gender: Gender, los: u32) -> PoolPatient {
        PoolPatient {
            id: id.into(),
            age: 50,
            los,
            lor: 0,
            gender,
            is_private: false,
            is_emergency: true,
            has_companion: false,
        }
    }

    fn mixed_pool() -> PatientPool {
        PatientPool {
            patients: vec![
                pool_patient("f", Gender::Female, 10),
                pool_patient("m", Gender::Male, 10),
            ],
        }
    }

    #[test]
    fn gender_separation_limits_admissions() {
        let ward = WardConfig::from_capacities(&[2]).unwrap();
        let horizon = Horizon::new(5).unwrap();
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = select_from_pool(mixed_pool(), &ward, horizon, 1.0, true, &mut rng);
            assert_eq!(s.patients.len(), 1);
            assert_eq!(s.remaining, 1);
            assert!(s.rejected_for_feasibility > 0);
        }
    }

    #[test]
    fn only_load_constrains_when_unchecked() {
        let ward = WardConfig::from_capacities(&[2]).unwrap();
        let horizon = Horizon::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = select_from_pool(mixed_pool(), &ward, horizon, 1.0, false, &mut rng);
        assert_eq!(s.patients.len(), 2);
        assert!(s.patients.iter().all(|p| p.admission_day == 1));
        assert_eq!(s.remaining, 0);
    }

    #[test]
    fn tiny_target_admits_nobody_on_day_one() {
        let ward = WardConfig::from_capacities(&[2, 2]).unwrap();
        let horizon = Horizon::new(10).unwrap();
        let pool = PatientPool {
            patients: (0..20)
                .map(|i| pool_patient(&format!("p{i}"), Gender::Male, 1))
                .collect(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = select_from_pool(pool, &ward, horizon, 0.1, false, &mut rng);
        assert!(s.patients.iter().all(|p| p.admission_day > 1));
        assert!(!s.patients.is_empty());
    }

    #[test]
    fn cumulated_load_never_exceeds_target() {
        let ward = WardConfig::from_capacities(&[2, 2, 4]).unwrap();
        let horizon = Horizon::new(20).unwrap();
        let pool = PatientPool {
            patients: (0..200)
                .map(|i| {
                    let gender = if i % 3 == 0 {
                        Gender::Female
                    } else {
                        Gender::Male
                    };
                    pool_patient(&format!("p{i}"), gender, 1 + i % 7)
                })
                .collect(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let s = select_from_pool(pool, &ward, horizon, 0.6, true, &mut rng);
        assert_eq!(s.patients.len() + s.remaining, 200);
        let mut inst = Instance::new(ward, horizon);
        inst.patients = s.patients;
        let per_day = inst.load_factor().per_day;
        let mut cumulated = 0.0;
        for (t, l) in per_day.iter().enumerate() {
            cumulated += l;
            assert!(cumulated / (t + 1) as f64 <= 0.6 + 1e-12);
        }
        for c in inst.daily_census() {
            assert!(is_feasible(c, &inst.ward).feasible);
        }
    }

    #[test]
    fn exhausted_pool_is_reported() {
        let ward = WardConfig::from_capacities(&[2]).unwrap();
        let horizon = Horizon::new(5).unwrap();
        let pool = PatientPool {
            patients: vec![pool_patient("p0", Gender::Male, 1)],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = select_from_pool(pool, &ward, horizon, 1.0, true, &mut rng);
        assert_eq!(s.patients.len(), 1);
        assert_eq!(s.warnings.len(), 1);
    }
}
