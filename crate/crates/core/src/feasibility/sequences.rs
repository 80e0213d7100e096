//! Families decided by scanning every candidate female bed total
//! `b ∈ [F, Σc − M]` with a polynomial exact subset-sum rule.

use super::family::{arithmetic, is_chain, is_superincreasing};
use super::{misclassified, Census, FeasibilityError, FeasibilityVerdict, Method, WardConfig};

fn candidate_range(census: Census, ward: &WardConfig) -> std::ops::RangeInclusive<u64> {
    u64::from(census.females)..=ward.total_capacity() - u64::from(census.males)
}

fn scan(
    census: Census,
    ward: &WardConfig,
    method: Method,
    mut exact: impl FnMut(u64) -> Option<Vec<usize>>,
) -> FeasibilityVerdict {
    if census.total() > ward.total_capacity() {
        return FeasibilityVerdict::capacity_exceeded();
    }
    candidate_range(census, ward)
        .find_map(&mut exact)
        .map(|rooms| FeasibilityVerdict::feasible(method, rooms))
        .unwrap_or_else(|| FeasibilityVerdict::infeasible(method))
}

/// Sorted capacities with every prefix sum at most the next capacity; the
/// largest-first greedy is exact for this shape.
pub fn check_superincreasing(
    census: Census,
    ward: &WardConfig,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    if !is_superincreasing(ward) {
        return Err(misclassified(
            "Superincreasing",
            ward,
            "sorted capacities are not superincreasing",
        ));
    }
    let order = ward.indices_by_capacity();
    let rooms = ward.rooms();
    Ok(scan(census, ward, Method::Superincreasing, |target| {
        let mut remaining = target;
        let mut picked = Vec::new();
        for &i in order.iter().rev() {
            let c = u64::from(rooms[i].capacity);
            if c <= remaining {
                remaining -= c;
                picked.push(i);
            }
        }
        (remaining == 0).then_some(picked)
    }))
}

/// Distinct capacities `a, a + d, …, a + (n − 1)d`, each occurring once.
///
/// A subset of size `k` sums to `k·a + d·s` where `s` is a sum of `k`
/// distinct indices from `0..n`, which takes every value in
/// `[k(k−1)/2, k(k−1)/2 + k(n−k)]`.
pub fn check_arithmetic(
    census: Census,
    ward: &WardConfig,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    let distinct: Vec<(u32, u32)> = ward.distinct().iter().map(|(&c, &n)| (c, n)).collect();
    let Some((first, step)) = arithmetic(&distinct) else {
        return Err(misclassified(
            "Arithmetic",
            ward,
            "capacities must be a repetition-free arithmetic sequence",
        ));
    };
    // position in the sequence -> room index
    let order = ward.indices_by_capacity();
    let n = order.len() as u64;
    let (a, d) = (u64::from(first), u64::from(step));
    Ok(scan(census, ward, Method::Arithmetic, |target| {
        (0..=n).find_map(|k| {
            let offset = target.checked_sub(k * a)?;
            if offset % d != 0 {
                return None;
            }
            let s = offset / d;
            let lo = k * k.saturating_sub(1) / 2;
            let hi = lo + k * (n - k);
            if s < lo || s > hi {
                return None;
            }
            Some(
                distinct_indices_with_sum(n, k, s - lo)
                    .into_iter()
                    .map(|pos| order[pos as usize])
                    .collect(),
            )
        })
    }))
}

/// `k` distinct positions from `0..n` whose sum exceeds `0 + 1 + … + (k−1)`
/// by `extra`; requires `extra ≤ k(n − k)`.
fn distinct_indices_with_sum(n: u64, k: u64, mut extra: u64) -> Vec<u64> {
    let mut positions: Vec<u64> = (0..k).collect();
    for j in (0..k as usize).rev() {
        let ceiling = n - k + j as u64;
        let shift = extra.min(ceiling - positions[j]);
        positions[j] += shift;
        extra -= shift;
    }
    debug_assert_eq!(extra, 0);
    positions
}

/// Distinct capacities forming a divisibility chain, arbitrary multiplicity.
/// Taking as many rooms of each size as fit, largest size first, is exact.
pub fn check_chain(
    census: Census,
    ward: &WardConfig,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    let distinct: Vec<(u32, u32)> = ward.distinct().iter().map(|(&c, &n)| (c, n)).collect();
    if !is_chain(&distinct) {
        return Err(misclassified(
            "Chain",
            ward,
            "distinct capacities do not form a divisibility chain",
        ));
    }
    let order = ward.indices_by_capacity();
    Ok(scan(census, ward, Method::Chain, |target| {
        let mut remaining = target;
        let mut picked = Vec::new();
        let mut cursor = order.len();
        for &(capacity, count) in distinct.iter().rev() {
            let c = u64::from(capacity);
            let take = u64::from(count).min(remaining / c);
            remaining -= take * c;
            // rooms of this capacity occupy order[cursor - count..cursor]
            let start = cursor - count as usize;
            picked.extend(order[start..start + take as usize].iter().copied());
            cursor = start;
        }
        (remaining == 0).then_some(picked)
    }))
}
