//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use wardgen_core::feasibility::Census;

/// Non-decreasing capacity lists of length `len` over `1..=max_cap`.
pub fn multisets(len: usize, max_cap: u32) -> Vec<Vec<u32>> {
    fn rec(len: usize, min: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for c in min..=max {
            cur.push(c);
            rec(len, c, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, 1, max_cap, &mut Vec::new(), &mut out);
    out
}

/// Non-decreasing capacity lists with sum at most `max_total`.
pub fn multisets_up_to_total(max_total: u32) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for c in min..=remaining {
            cur.push(c);
            rec(remaining - c, c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(max_total, 1, &mut Vec::new(), &mut out);
    out
}

/// Enumerates every room subset.
pub fn brute_force(census: Census, caps: &[u32]) -> bool {
    let total: u64 = caps.iter().map(|&c| u64::from(c)).sum();
    (0u64..1 << caps.len()).any(|mask| {
        let s: u64 = (0..caps.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| u64::from(caps[i]))
            .sum();
        s >= u64::from(census.females) && total - s >= u64::from(census.males)
    })
}

/// Set of subset sums grown one room at a time.
pub fn subset_sums(caps: &[u32]) -> BTreeSet<u64> {
    let mut sums = BTreeSet::from([0u64]);
    for &c in caps {
        let shifted: Vec<u64> = sums.iter().map(|s| s + u64::from(c)).collect();
        sums.extend(shifted);
    }
    sums
}

pub fn feasible_by_sums(census: Census, caps: &[u32], sums: &BTreeSet<u64>) -> bool {
    let total: u64 = caps.iter().map(|&c| u64::from(c)).sum();
    let (f, m) = (u64::from(census.females), u64::from(census.males));
    f + m <= total && sums.range(f..=total - m).next().is_some()
}
