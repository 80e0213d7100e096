use serde::{Deserialize, Serialize};

use super::frobenius::gcd;
use super::{Method, WardConfig};

/// Shape of a ward whose capacities are all multiples of a common scalar `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum ScaledCase {
    /// Capacities in `{a, n·a}` with at least `n − 1` rooms of size `a`.
    TwoSizes { n: u32 },
    /// Capacities exactly `{a, 2a, …, n·a}`, each present.
    Multiples { n: u32 },
    /// Capacities exactly `{a·2^0, …, a·2^n}`, each present.
    PowersOfTwo { n: u32 },
}

/// The rule a ward is routed to by [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum CapacityFamily {
    ConstantCapacity {
        capacity: u32,
    },
    /// Capacities `{1, c}` with `R_1 ≥ c − 1`.
    SinglesPlusConstant {
        capacity: u32,
    },
    /// Capacities `{2, 2c}` with `R_2 ≥ c − 1`; `half` is `c`.
    EvenPair {
        half: u32,
    },
    /// Capacities exactly `{1, …, n}`.
    AllSizesOneToN {
        n: u32,
    },
    /// Capacities exactly `{2^0, …, 2^n}`.
    PowersOfTwo {
        n: u32,
    },
    ScaledFamily {
        scalar: u32,
        case: ScaledCase,
    },
    /// Two coprime capacities `small < large` with `R_large < small`.
    FrobeniusCoprime {
        small: u32,
        large: u32,
    },
    /// Distinct capacities form a divisibility chain.
    Chain,
    /// Sorted capacities are superincreasing.
    Superincreasing,
    /// Each capacity occurs once and they form `first, first + step, …`.
    Arithmetic {
        first: u32,
        step: u32,
    },
    SubsetSumOracle,
}

impl CapacityFamily {
    pub fn method(&self) -> Method {
        match self {
            CapacityFamily::ConstantCapacity { .. } => Method::ConstantCapacity,
            CapacityFamily::SinglesPlusConstant { .. } => Method::SinglesPlusConstant,
            CapacityFamily::EvenPair { .. } => Method::EvenPair,
            CapacityFamily::AllSizesOneToN { .. } => Method::AllSizesOneToN,
            CapacityFamily::PowersOfTwo { .. } => Method::PowersOfTwo,
            CapacityFamily::ScaledFamily { .. } => Method::ScaledFamily,
            CapacityFamily::FrobeniusCoprime { .. } => Method::FrobeniusCoprime,
            CapacityFamily::Chain => Method::Chain,
            CapacityFamily::Superincreasing => Method::Superincreasing,
            CapacityFamily::Arithmetic { .. } => Method::Arithmetic,
            CapacityFamily::SubsetSumOracle => Method::SubsetSumOracle,
        }
    }

    pub fn name(&self) -> &'static str {
        self.method().name()
    }

    /// True when the family is decided without the subset-sum fallback.
    ///
    /// `FrobeniusCoprime` additionally needs a large enough census on one
    /// side; below that bound the oracle decides.
    pub fn is_polynomial(&self) -> bool {
        !matches!(self, CapacityFamily::SubsetSumOracle)
    }
}

/// Routes a ward to the first matching family.
///
/// Order: constant, singles plus constant, scaled families with `a ≥ 2`, even
/// pair, `{1..n}`, powers of two, coprime pair, chain, superincreasing,
/// arithmetic, oracle. Every `{2, 2c}` ward is also the scaled family
/// `a = 2, {a, c·a}`, so the even-pair rule is only reached through
/// [`super::check_even_pair`] directly.
pub fn classify(ward: &WardConfig) -> CapacityFamily {
    let distinct: Vec<(u32, u32)> = ward.distinct().iter().map(|(&c, &n)| (c, n)).collect();

    if distinct.len() == 1 {
        return CapacityFamily::ConstantCapacity {
            capacity: distinct[0].0,
        };
    }
    if let Some(capacity) = singles_plus_constant(&distinct) {
        return CapacityFamily::SinglesPlusConstant { capacity };
    }
    if let Some((scalar, case)) = scaled_family(&distinct, false) {
        return CapacityFamily::ScaledFamily { scalar, case };
    }
    if let Some(half) = even_pair(&distinct) {
        return CapacityFamily::EvenPair { half };
    }
    if let Some(n) = all_sizes(&distinct) {
        return CapacityFamily::AllSizesOneToN { n };
    }
    if let Some(n) = powers_of_two(&distinct) {
        return CapacityFamily::PowersOfTwo { n };
    }
    if let Some((small, large)) = frobenius_pair(&distinct) {
        return CapacityFamily::FrobeniusCoprime { small, large };
    }
    if is_chain(&distinct) {
        return CapacityFamily::Chain;
    }
    if is_superincreasing(ward) {
        return CapacityFamily::Superincreasing;
    }
    if let Some((first, step)) = arithmetic(&distinct) {
        return CapacityFamily::Arithmetic { first, step };
    }
    CapacityFamily::SubsetSumOracle
}

pub(crate) fn singles_plus_constant(distinct: &[(u32, u32)]) -> Option<u32> {
    match distinct {
        [(1, singles), (c, _)] if *c >= 2 && *singles >= c - 1 => Some(*c),
        _ => None,
    }
}

pub(crate) fn even_pair(distinct: &[(u32, u32)]) -> Option<u32> {
    match distinct {
        [(2, doubles), (big, _)] if big % 2 == 0 && *big >= 4 && *doubles >= big / 2 - 1 => {
            Some(big / 2)
        }
        _ => None,
    }
}

pub(crate) fn all_sizes(distinct: &[(u32, u32)]) -> Option<u32> {
    let exact = distinct
        .iter()
        .enumerate()
        .all(|(i, &(c, _))| u64::from(c) == i as u64 + 1);
    exact.then_some(distinct.len() as u32)
}

pub(crate) fn powers_of_two(distinct: &[(u32, u32)]) -> Option<u32> {
    let exact = distinct
        .iter()
        .enumerate()
        .all(|(i, &(c, _))| i < 32 && u64::from(c) == 1u64 << i);
    exact.then_some(distinct.len() as u32 - 1)
}

/// Matches the three scaled shapes for the given scalar.
pub(crate) fn scaled_case(distinct: &[(u32, u32)], scalar: u32) -> Option<ScaledCase> {
    if scalar == 0 || distinct.len() < 2 || distinct.iter().any(|&(c, _)| c % scalar != 0) {
        return None;
    }
    let reduced: Vec<(u32, u32)> = distinct.iter().map(|&(c, n)| (c / scalar, n)).collect();
    if let Some(n) = singles_plus_constant(&reduced) {
        return Some(ScaledCase::TwoSizes { n });
    }
    if let Some(n) = all_sizes(&reduced) {
        return Some(ScaledCase::Multiples { n });
    }
    if let Some(n) = powers_of_two(&reduced) {
        return Some(ScaledCase::PowersOfTwo { n });
    }
    None
}

/// Tries every divisor of the capacities' gcd, largest first.
pub(crate) fn scaled_family(
    distinct: &[(u32, u32)],
    allow_unit: bool,
) -> Option<(u32, ScaledCase)> {
    let g = distinct
        .iter()
        .fold(0u64, |acc, &(c, _)| gcd(acc, u64::from(c))) as u32;
    let lowest = if allow_unit { 1 } else { 2 };
    divisors_descending(g)
        .into_iter()
        .filter(|&a| a >= lowest)
        .find_map(|a| scaled_case(distinct, a).map(|case| (a, case)))
}

fn divisors_descending(value: u32) -> Vec<u32> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u32;
    while u64::from(d) * u64::from(d) <= u64::from(value) {
        if value.is_multiple_of(d) {
            small.push(d);
            if d != value / d {
                large.push(value / d);
            }
        }
        d += 1;
    }
    large.into_iter().chain(small.into_iter().rev()).collect()
}

pub(crate) fn frobenius_pair(distinct: &[(u32, u32)]) -> Option<(u32, u32)> {
    match distinct {
        [(small, _), (large, large_count)]
            if gcd(u64::from(*small), u64::from(*large)) == 1 && large_count < small =>
        {
            Some((*small, *large))
        }
        _ => None,
    }
}

pub(crate) fn is_chain(distinct: &[(u32, u32)]) -> bool {
    distinct.len() >= 2 && distinct.windows(2).all(|w| w[1].0 % w[0].0 == 0)
}

pub(crate) fn is_superincreasing(ward: &WardConfig) -> bool {
    let mut prefix = 0u64;
    for (i, (&c, &n)) in ward.distinct().iter().enumerate() {
        for k in 0..n {
            if (i > 0 || k > 0) && prefix > u64::from(c) {
                return false;
            }
            prefix += u64::from(c);
        }
    }
    true
}

pub(crate) fn arithmetic(distinct: &[(u32, u32)]) -> Option<(u32, u32)> {
    if distinct.len() < 2 || distinct.iter().any(|&(_, n)| n != 1) {
        return None;
    }
    let step = distinct[1].0 - distinct[0].0;
    distinct
        .windows(2)
        .all(|w| w[1].0 - w[0].0 == step)
        .then_some((distinct[0].0, step))
}
