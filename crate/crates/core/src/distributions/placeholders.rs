//! Synthetic ward-type tables bundled with the library.
//!
//! The shapes are invented stand-ins with no hospital data behind them: four
//! age types, five LOS types and five joint age/LOS types. Real tables are
//! supplied as files in the table text format.

use std::f64::consts::PI;

use super::table::{EmpiricalTable, TableHeader, TableKind, DEFAULT_AGE_RANGE, DEFAULT_LOS_RANGE};

pub const PLACEHOLDER_LABEL: &str = "synthetic placeholder, not derived from hospital data";

pub const AGE_TABLE_IDS: [&str; 4] = [
    "placeholder-age-1",
    "placeholder-age-2",
    "placeholder-age-3",
    "placeholder-age-4",
];
pub const LOS_TABLE_IDS: [&str; 5] = [
    "placeholder-los-1",
    "placeholder-los-2",
    "placeholder-los-3",
    "placeholder-los-4",
    "placeholder-los-5",
];
pub const JOINT_TABLE_IDS: [&str; 5] = [
    "placeholder-joint-1",
    "placeholder-joint-2",
    "placeholder-joint-3",
    "placeholder-joint-4",
    "placeholder-joint-5",
];

pub fn builtin_ids() -> impl Iterator<Item = &'static str> {
    AGE_TABLE_IDS
        .into_iter()
        .chain(LOS_TABLE_IDS)
        .chain(JOINT_TABLE_IDS)
}

fn gaussian(x: f64, mean: f64, sd: f64) -> f64 {
    (-(x - mean).powi(2) / (2.0 * sd * sd)).exp() / (sd * (2.0 * PI).sqrt())
}

/// Mixtures of bell curves over ages `(weight, mean, sd)`.
const AGE_SHAPES: [&[(f64, f64, f64)]; 4] = [
    &[(1.0, 32.0, 9.0)],
    &[(0.45, 38.0, 10.0), (0.55, 74.0, 9.0)],
    &[(1.0, 79.0, 7.0)],
    &[(0.5, 55.0, 18.0), (0.5, 70.0, 14.0)],
];

/// `(mean, sd)` of the LOS bell per type.
const LOS_SHAPES: [(f64, f64); 5] = [(1.5, 1.0), (3.0, 1.6), (5.0, 2.5), (8.0, 3.5), (12.0, 5.0)];

fn age_weight(shape: usize, age: f64) -> f64 {
    AGE_SHAPES[shape]
        .iter()
        .map(|&(w, m, s)| w * gaussian(age, m, s))
        .sum()
}

/// LOS bell whose mean grows with age for joint tables.
fn los_weight(shape: usize, los: f64, age: f64) -> f64 {
    let (mean, sd) = LOS_SHAPES[shape];
    let shift = 1.0 + 0.6 * (age - 18.0) / 82.0;
    gaussian(los, mean * shift, sd * shift)
}

fn header(kind: TableKind, id: &str) -> TableHeader {
    TableHeader::new(kind).with_label(format!("{id} ({PLACEHOLDER_LABEL})"))
}

pub fn age_table(index: usize) -> EmpiricalTable {
    let (lo, hi) = DEFAULT_AGE_RANGE;
    let rows: Vec<(u32, f64)> = (lo..=hi)
        .map(|a| (a, age_weight(index, f64::from(a))))
        .collect();
    EmpiricalTable::ages(header(TableKind::Age, AGE_TABLE_IDS[index]), &rows)
        .expect("placeholder age table is valid")
}

pub fn los_table(index: usize) -> EmpiricalTable {
    let (lo, hi) = DEFAULT_LOS_RANGE;
    let rows: Vec<(u32, f64)> = (lo..=hi)
        .map(|l| (l, los_weight(index, f64::from(l), 18.0)))
        .collect();
    EmpiricalTable::lengths_of_stay(header(TableKind::Los, LOS_TABLE_IDS[index]), &rows)
        .expect("placeholder LOS table is valid")
}

pub fn joint_table(index: usize) -> EmpiricalTable {
    let (age_lo, age_hi) = DEFAULT_AGE_RANGE;
    let (los_lo, los_hi) = DEFAULT_LOS_RANGE;
    let age_shape = index % AGE_SHAPES.len();
    let mut rows = Vec::new();
    for age in age_lo..=age_hi {
        let a = f64::from(age);
        for los in los_lo..=los_hi {
            rows.push((
                age,
                los,
                age_weight(age_shape, a) * los_weight(index, f64::from(los), a),
            ));
        }
    }
    EmpiricalTable::joint(header(TableKind::Joint, JOINT_TABLE_IDS[index]), &rows)
        .expect("placeholder joint table is valid")
}

/// Bundled table for `id`, if it names one.
pub fn builtin_table(id: &str) -> Option<EmpiricalTable> {
    let position = |ids: &[&str]| ids.iter().position(|&candidate| candidate == id);
    if let Some(i) = position(&AGE_TABLE_IDS) {
        Some(age_table(i))
    } else if let Some(i) = position(&LOS_TABLE_IDS) {
        Some(los_table(i))
    } else {
        position(&JOINT_TABLE_IDS).map(joint_table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_placeholders_build() {
        for id in builtin_ids() {
            let table = builtin_table(id).unwrap();
            let total: f64 = table.cells().iter().map(|c| c.weight).sum();
            assert!((total - 1.0).abs() < 1e-9, "{id}");
            assert!(table.label().unwrap().contains("synthetic placeholder"));
        }
        assert!(builtin_table("placeholder-age-9").is_none());
    }

    #[test]
    fn los_types_are_ordered_by_mean() {
        let means: Vec<f64> = (0..5).map(|i| los_table(i).mean_los().unwrap()).collect();
        assert!(means.windows(2).all(|w| w[0] < w[1]), "{means:?}");
    }

    #[test]
    fn placeholders_survive_text_round_trip() {
        for id in builtin_ids() {
            let table = builtin_table(id).unwrap();
            let parsed = EmpiricalTable::parse(&table.to_text()).unwrap();
            assert_eq!(parsed.cells().len(), table.cells().len());
            for (a, b) in parsed.cells().iter().zip(table.cells()) {
                assert_eq!((a.age, a.los), (b.age, b.los));
                assert!((a.weight - b.weight).abs() < 1e-12);
            }
        }
    }
}
