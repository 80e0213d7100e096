//! Summary statistics of an instance file.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;
use wardgen_core::model::{Gender, Instance};

/// Width of an age bucket in years.
pub const AGE_BUCKET: u32 = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bucket {
    /// Inclusive lower end.
    pub start: u32,
    /// Inclusive upper end.
    pub end: u32,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rates {
    pub female: f64,
    pub emergency: f64,
    pub private: f64,
    pub companion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceStats {
    pub horizon: u32,
    pub rooms: usize,
    pub beds: u64,
    pub patients: usize,
    pub load_per_day: Vec<f64>,
    pub load: f64,
    pub rates: Rates,
    pub age_histogram: Vec<Bucket>,
    pub los_histogram: Vec<Bucket>,
}

fn histogram(values: impl Iterator<Item = u32>, width: u32) -> Vec<Bucket> {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v / width * width).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(start, count)| Bucket {
            start,
            end: start + width - 1,
            count,
        })
        .collect()
}

impl InstanceStats {
    pub fn of(instance: &Instance) -> Self {
        let load = instance.load_factor();
        let n = instance.patients.len();
        let rate = |pred: &dyn Fn(&wardgen_core::model::Patient) -> bool| {
            if n == 0 {
                0.0
            } else {
                instance.patients.iter().filter(|p| pred(p)).count() as f64 / n as f64
            }
        };
        Self {
            horizon: instance.horizon.days,
            rooms: instance.ward.room_count(),
            beds: instance.ward.total_capacity(),
            patients: n,
            load_per_day: load.per_day,
            load: load.overall,
            rates: Rates {
                female: rate(&|p| p.gender == Gender::Female),
                emergency: rate(&|p| p.is_emergency),
                private: rate(&|p| p.is_private),
                companion: rate(&|p| p.has_companion),
            },
            age_histogram: histogram(instance.patients.iter().map(|p| p.age), AGE_BUCKET),
            los_histogram: histogram(
                instance
                    .patients
                    .iter()
                    .map(|p| p.los().clamp(0, i64::from(u32::MAX)) as u32),
                1,
            ),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "horizon     {} days", self.horizon);
        let _ = writeln!(out, "ward        {} rooms, {} beds", self.rooms, self.beds);
        let _ = writeln!(out, "patients    {}", self.patients);
        let _ = writeln!(out, "load        {:.4}", self.load);
        let _ = writeln!(
            out,
            "rates       female {:.3}  emergency {:.3}  private {:.3}  companion {:.3}",
            self.rates.female, self.rates.emergency, self.rates.private, self.rates.companion
        );
        let _ = writeln!(out, "\nload per day");
        for (t, l) in self.load_per_day.iter().enumerate() {
            let _ = writeln!(out, "  {:>4}  {:.3}", t + 1, l);
        }
        let _ = writeln!(out, "\nage");
        render_buckets(&mut out, &self.age_histogram, |b| {
            format!("{}-{}", b.start, b.end)
        });
        let _ = writeln!(out, "\nlength of stay");
        render_buckets(&mut out, &self.los_histogram, |b| b.start.to_string());
        out
    }
}

fn render_buckets(out: &mut String, buckets: &[Bucket], label: impl Fn(&Bucket) -> String) {
    let max = buckets.iter().map(|b| b.count).max().unwrap_or(0).max(1);
    for b in buckets {
        let bar = "#".repeat((b.count * 40).div_ceil(max));
        let _ = writeln!(out, "  {:>7}  {:>6}  {bar}", label(b), b.count);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wardgen_core::feasibility::WardConfig;
    use wardgen_core::model::{Horizon, Patient};

    fn empty() -> Instance {
        Instance::new(
            WardConfig::from_capacities(&[2, 2]).unwrap(),
            Horizon::new(4).unwrap(),
        )
    }

    #[test]
    fn empty_instance_is_all_zero() {
        let stats = InstanceStats::of(&empty());
        assert_eq!(stats.patients, 0);
        assert_eq!(stats.load, 0.0);
        assert_eq!(stats.load_per_day, vec![0.0; 4]);
        assert_eq!(stats.rates.female, 0.0);
        assert!(stats.age_histogram.is_empty());
        assert!(stats.render().contains("patients    0"));
    }

    #[test]
    fn single_patient_load_by_hand() {
        let mut instance = empty();
        instance.patients.push(Patient {
            id: "a".into(),
            registration_day: 1,
            admission_day: 2,
            discharge_day: 4,
            age: 63,
            gender: Gender::Female,
            is_private: true,
            is_emergency: false,
            has_companion: false,
        });
        let stats = InstanceStats::of(&instance);
        // two occupied bed-days out of 4 beds over 4 days
        assert_eq!(stats.load, 2.0 / 16.0);
        assert_eq!(stats.load_per_day, vec![0.0, 0.25, 0.25, 0.0]);
        assert_eq!(stats.rates.female, 1.0);
        assert_eq!(stats.rates.private, 1.0);
        assert_eq!(
            stats.age_histogram,
            vec![Bucket {
                start: 60,
                end: 64,
                count: 1
            }]
        );
        assert_eq!(
            stats.los_histogram,
            vec![Bucket {
                start: 2,
                end: 2,
                count: 1
            }]
        );
    }
}
