//! Nearby wards whose family has a closed-form feasibility rule.

use std::collections::BTreeSet;

use serde::Serialize;
use wardgen_core::feasibility::{classify, CapacityFamily, WardConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Suggestion {
    /// Sorted capacities of the suggested ward.
    pub capacities: Vec<u32>,
    pub edit: String,
    pub family: CapacityFamily,
}

fn guaranteed(capacities: &[u32]) -> Option<CapacityFamily> {
    let ward = WardConfig::from_capacities(capacities).ok()?;
    let family = classify(&ward);
    family.is_polynomial().then_some(family)
}

/// Up to `limit` guaranteed wards one room edit away from `capacities`,
/// closest total bed count first. A constant-capacity ward with the same
/// number of rooms closes the list when single edits do not fill it.
pub fn nearest_guaranteed(capacities: &[u32], limit: usize) -> Vec<Suggestion> {
    let max = capacities.iter().copied().max().unwrap_or(1);
    let total: i64 = capacities.iter().map(|&c| i64::from(c)).sum();
    let mut candidates: Vec<(Vec<u32>, String)> = Vec::new();
    for (i, &c) in capacities.iter().enumerate() {
        if capacities.len() > 1 {
            let mut caps = capacities.to_vec();
            caps.remove(i);
            candidates.push((caps, format!("remove room {} (capacity {c})", i + 1)));
        }
        for other in (1..=max + 1).filter(|&o| o != c) {
            let mut caps = capacities.to_vec();
            caps[i] = other;
            candidates.push((
                caps,
                format!("change room {} from {c} to {other} beds", i + 1),
            ));
        }
    }
    for c in 1..=max + 1 {
        let mut caps = capacities.to_vec();
        caps.push(c);
        candidates.push((caps, format!("add a room with {c} beds")));
    }

    let mut seen = BTreeSet::new();
    let mut found: Vec<(i64, Suggestion)> = Vec::new();
    for (mut caps, edit) in candidates {
        caps.sort_unstable();
        if !seen.insert(caps.clone()) {
            continue;
        }
        if let Some(family) = guaranteed(&caps) {
            let distance = (caps.iter().map(|&c| i64::from(c)).sum::<i64>() - total).abs();
            found.push((
                distance,
                Suggestion {
                    capacities: caps,
                    edit,
                    family,
                },
            ));
        }
    }
    found.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then_with(|| a.1.capacities.cmp(&b.1.capacities))
    });
    let mut out: Vec<Suggestion> = found.into_iter().map(|(_, s)| s).take(limit).collect();

    if out.len() < limit && !capacities.is_empty() {
        let rooms = capacities.len() as i64;
        let c = ((total + rooms / 2) / rooms).max(1) as u32;
        let caps = vec![c; capacities.len()];
        if !out.iter().any(|s| s.capacities == caps) {
            if let Some(family) = guaranteed(&caps) {
                out.push(Suggestion {
                    capacities: caps,
                    edit: format!("use {} rooms with {c} beds each", capacities.len()),
                    family,
                });
            }
        }
    }
    out
}
