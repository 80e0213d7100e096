use super::family::frobenius_pair;
use super::{
    misclassified, subset_sum_oracle, Census, FeasibilityError, FeasibilityVerdict, Method,
    WardConfig,
};

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Returns `(g, x, y)` with `a·x + b·y = g = gcd(a, b)`.
fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_r, old_s, old_t)
}

/// The representation `N = x1·a1 + x2·a2` with `x1, x2 ≥ 0` and `x2 < a1`, if
/// any exists. For coprime `a1, a2` there is at most one such pair for every
/// `N`: `x2` is fixed as `N·a2⁻¹ mod a1`.
pub fn canonical_representation(
    a1: u64,
    a2: u64,
    value: u64,
) -> Result<Option<(u64, u64)>, FeasibilityError> {
    if a1 == 0 || a2 == 0 {
        return Err(FeasibilityError::NonPositive);
    }
    let (g, _, inverse) = extended_gcd(i128::from(a1), i128::from(a2));
    if g != 1 {
        return Err(FeasibilityError::NotCoprime(a1, a2));
    }
    let m = i128::from(a1);
    let x2 = (i128::from(value) % m * inverse.rem_euclid(m)).rem_euclid(m);
    let rest = i128::from(value) - x2 * i128::from(a2);
    if rest < 0 {
        return Ok(None);
    }
    debug_assert_eq!(rest % m, 0);
    Ok(Some(((rest / m) as u64, x2 as u64)))
}

/// The unique `(x1, x2)` with `x2 < a1` and `N = x1·a1 + x2·a2`, for coprime
/// `a1, a2` and `N ≥ (a1 − 1)(a2 − 1)`.
pub fn frobenius_unique_pair(a1: u64, a2: u64, value: u64) -> Result<(u64, u64), FeasibilityError> {
    if a1 == 0 || a2 == 0 {
        return Err(FeasibilityError::NonPositive);
    }
    let bound = (a1 - 1) * (a2 - 1);
    if value < bound {
        return Err(FeasibilityError::BelowBound { value, bound });
    }
    Ok(canonical_representation(a1, a2, value)?
        .expect("every value from the bound upwards is representable"))
}

/// Two coprime capacities `a1 < a2` with `R_{a2} < a1`.
///
/// When one side of the census is at least `(a1 − 1)(a2 − 1)`, every
/// candidate sum `N` in `[that side, total − other side]` has one
/// representation with `x2 < a1`; since `x2 ≤ R_{a2} < a1` it is the only one
/// that can fit, so checking `x1 ≤ R_{a1}` decides. Below the bound on both
/// sides the subset-sum oracle decides.
pub fn check_frobenius_coprime(
    census: Census,
    ward: &WardConfig,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    let distinct: Vec<(u32, u32)> = ward.distinct().iter().map(|(&c, &n)| (c, n)).collect();
    let Some((small, large)) = frobenius_pair(&distinct) else {
        return Err(misclassified(
            "FrobeniusCoprime",
            ward,
            "capacities must be two coprime sizes a1 < a2 with fewer than a1 rooms of size a2",
        ));
    };
    let total = ward.total_capacity();
    if census.total() > total {
        return Ok(FeasibilityVerdict::capacity_exceeded());
    }
    let (a1, a2) = (u64::from(small), u64::from(large));
    let bound = (a1 - 1) * (a2 - 1);
    let (side, swapped) = if u64::from(census.females) >= bound {
        (census, false)
    } else if u64::from(census.males) >= bound {
        (census.swapped(), true)
    } else {
        return Ok(subset_sum_oracle(census, ward));
    };

    let (count_small, count_large) = (
        u64::from(ward.count_of(small)),
        u64::from(ward.count_of(large)),
    );
    let lo = u64::from(side.females);
    let hi = total - u64::from(side.males);
    for value in lo..=hi {
        let (x1, x2) = frobenius_unique_pair(a1, a2, value)?;
        if x1 <= count_small && x2 <= count_large {
            let mut rooms = pick_rooms(ward, small, x1 as usize);
            rooms.extend(pick_rooms(ward, large, x2 as usize));
            if swapped {
                rooms = complement(ward, &rooms);
            }
            return Ok(FeasibilityVerdict::feasible(
                Method::FrobeniusCoprime,
                rooms,
            ));
        }
    }
    Ok(FeasibilityVerdict::infeasible(Method::FrobeniusCoprime))
}

fn pick_rooms(ward: &WardConfig, capacity: u32, count: usize) -> Vec<usize> {
    ward.rooms()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.capacity == capacity)
        .map(|(i, _)| i)
        .take(count)
        .collect()
}

pub(crate) fn complement(ward: &WardConfig, rooms: &[usize]) -> Vec<usize> {
    let mut taken = vec![false; ward.room_count()];
    for &r in rooms {
        taken[r] = true;
    }
    (0..ward.room_count()).filter(|&i| !taken[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exhaustive(a1: u64, a2: u64, value: u64) -> Vec<(u64, u64)> {
        (0..a1)
            .filter(|x2| x2 * a2 <= value && (value - x2 * a2).is_multiple_of(a1))
            .map(|x2| ((value - x2 * a2) / a1, x2))
            .collect()
    }

    #[test]
    fn unique_pair_examples() {
        assert_eq!(exhaustive(3, 5, 8), vec![(1, 1)]);
        assert_eq!(frobenius_unique_pair(3, 5, 8).unwrap(), (1, 1));
        assert_eq!(exhaustive(2, 3, 2), vec![(1, 0)]);
        assert_eq!(frobenius_unique_pair(2, 3, 2).unwrap(), (1, 0));
        assert_eq!(exhaustive(3, 4, 6), vec![(2, 0)]);
        assert_eq!(frobenius_unique_pair(3, 4, 6).unwrap(), (2, 0));
    }

    #[test]
    fn unique_pair_errors() {
        assert_eq!(
            frobenius_unique_pair(4, 6, 100),
            Err(FeasibilityError::NotCoprime(4, 6))
        );
        assert!(matches!(
            frobenius_unique_pair(3, 5, 7),
            Err(FeasibilityError::BelowBound { value: 7, bound: 8 })
        ));
        assert_eq!(
            frobenius_unique_pair(0, 5, 7),
            Err(FeasibilityError::NonPositive)
        );
    }

    #[test]
    fn uniqueness_sweep() {
        for a1 in 1..=12u64 {
            for a2 in 1..=12u64 {
                if gcd(a1, a2) != 1 {
                    continue;
                }
                let bound = (a1 - 1) * (a2 - 1);
                for value in bound..=bound + 50 {
                    let all = exhaustive(a1, a2, value);
                    assert_eq!(all.len(), 1, "a1={a1} a2={a2} N={value}");
                    assert_eq!(frobenius_unique_pair(a1, a2, value).unwrap(), all[0]);
                }
            }
        }
    }

    #[test]
    fn below_bound_matches_search() {
        for value in 0..8 {
            let found = canonical_representation(3, 5, value).unwrap();
            assert_eq!(
                found.into_iter().collect::<Vec<_>>(),
                exhaustive(3, 5, value)
            );
        }
        // 7 is the largest value 3 and 5 cannot form
        assert_eq!(canonical_representation(3, 5, 7).unwrap(), None);
    }

    fn frobenius_ward() -> WardConfig {
        let mut caps = vec![3; 10];
        caps.extend([5, 5]);
        WardConfig::from_capacities(&caps).unwrap()
    }

    #[test]
    fn coprime_pair_examples() {
        let w = frobenius_ward();
        assert_eq!(w.total_capacity(), 40);
        for (f, m, expected) in [(8, 30, true), (8, 32, true)] {
            let census = Census::new(f, m);
            let v = check_frobenius_coprime(census, &w).unwrap();
            assert_eq!(v.feasible, expected);
            assert_eq!(v.feasible, subset_sum_oracle(census, &w).feasible);
            assert_eq!(v.method, Method::FrobeniusCoprime);
            assert!(v.witness_is_sound(census, &w));
        }
        let v = check_frobenius_coprime(Census::new(8, 33), &w).unwrap();
        assert_eq!(v.method, Method::CapacityExceeded);
    }

    #[test]
    fn small_census_uses_swap_or_oracle() {
        let w = frobenius_ward();
        let census = Census::new(2, 20);
        let v = check_frobenius_coprime(census, &w).unwrap();
        assert_eq!(v.method, Method::FrobeniusCoprime);
        assert!(v.witness_is_sound(census, &w));

        let census = Census::new(1, 4);
        let v = check_frobenius_coprime(census, &w).unwrap();
        assert_eq!(v.method, Method::SubsetSumOracle);
        assert!(v.feasible);
    }

    #[test]
    fn rejects_non_coprime_wards() {
        let w = WardConfig::from_capacities(&[2, 4]).unwrap();
        assert!(check_frobenius_coprime(Census::new(3, 1), &w).is_err());
        // R_{a2} = 3 is not below a1 = 3
        let w = WardConfig::from_capacities(&[3, 5, 5, 5]).unwrap();
        assert!(check_frobenius_coprime(Census::new(9, 0), &w).is_err());
    }
}
