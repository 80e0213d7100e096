//! Gender-separation feasibility for a single day.
//!
//! A census `(F, M)` fits a ward when some subset `S` of rooms holds at least
//! `F` beds while the remaining rooms hold at least `M` beds. The general
//! question is a subset-sum problem; for several capacity structures a closed
//! form or a greedy rule decides it directly. [`is_feasible`] classifies the
//! ward once and dispatches to the cheapest applicable rule, falling back to
//! the reachable-sums dynamic program in [`subset_sum_oracle`].

mod closed_form;
mod family;
mod frobenius;
mod oracle;
mod sequences;
mod ward;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use closed_form::{
    check_all_sizes_one_to_n, check_constant_capacity, check_even_pair, check_powers_of_two,
    check_scaled_family, check_singles_plus_constant, split_into_units,
};
pub use family::{classify, CapacityFamily, ScaledCase};
pub use frobenius::{canonical_representation, check_frobenius_coprime, frobenius_unique_pair};
pub use oracle::{reachable_sums, subset_sum_oracle};
pub use sequences::{check_arithmetic, check_chain, check_superincreasing};
pub use ward::{Census, Room, WardConfig, MAX_CAPACITY};

/// Which criterion produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    ConstantCapacity,
    SinglesPlusConstant,
    EvenPair,
    Superincreasing,
    Arithmetic,
    Chain,
    FrobeniusCoprime,
    AllSizesOneToN,
    PowersOfTwo,
    ScaledFamily,
    SubsetSumOracle,
    CapacityExceeded,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::ConstantCapacity => "ConstantCapacity",
            Method::SinglesPlusConstant => "SinglesPlusConstant",
            Method::EvenPair => "EvenPair",
            Method::Superincreasing => "Superincreasing",
            Method::Arithmetic => "Arithmetic",
            Method::Chain => "Chain",
            Method::FrobeniusCoprime => "FrobeniusCoprime",
            Method::AllSizesOneToN => "AllSizesOneToN",
            Method::PowersOfTwo => "PowersOfTwo",
            Method::ScaledFamily => "ScaledFamily",
            Method::SubsetSumOracle => "SubsetSumOracle",
            Method::CapacityExceeded => "CapacityExceeded",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub method: Method,
    /// Sorted indices of the rooms given to female patients.
    pub witness: Option<Vec<usize>>,
}

impl FeasibilityVerdict {
    pub(crate) fn feasible(method: Method, mut witness: Vec<usize>) -> Self {
        witness.sort_unstable();
        Self {
            feasible: true,
            method,
            witness: Some(witness),
        }
    }

    pub(crate) fn infeasible(method: Method) -> Self {
        Self {
            feasible: false,
            method,
            witness: None,
        }
    }

    pub(crate) fn capacity_exceeded() -> Self {
        Self::infeasible(Method::CapacityExceeded)
    }

    /// Checks both covering inequalities for the witness, if one is present.
    pub fn witness_is_sound(&self, census: Census, ward: &WardConfig) -> bool {
        match &self.witness {
            None => true,
            Some(rooms) => {
                let mut seen = vec![false; ward.room_count()];
                for &r in rooms {
                    if r >= seen.len() || seen[r] {
                        return false;
                    }
                    seen[r] = true;
                }
                let female_beds = ward.capacity_of(rooms);
                let male_beds = ward.total_capacity() - female_beds;
                female_beds >= u64::from(census.females) && male_beds >= u64::from(census.males)
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeasibilityError {
    #[error("a ward needs at least one room")]
    EmptyWard,
    #[error("room {room} has invalid capacity {capacity}")]
    InvalidCapacity { room: String, capacity: u32 },
    #[error("duplicate room id {0}")]
    DuplicateRoomId(String),
    #[error("ward {ward} does not satisfy the {family} precondition: {reason}")]
    Misclassified {
        family: &'static str,
        ward: String,
        reason: String,
    },
    #[error("{0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("arguments must be positive")]
    NonPositive,
    #[error("{value} is below the representation bound {bound}")]
    BelowBound { value: u64, bound: u64 },
}

pub(crate) fn misclassified(
    family: &'static str,
    ward: &WardConfig,
    reason: impl Into<String>,
) -> FeasibilityError {
    FeasibilityError::Misclassified {
        family,
        ward: ward.to_string(),
        reason: reason.into(),
    }
}

/// Decides whether `census` fits `ward` under gender separation.
///
/// The verdict always agrees with [`subset_sum_oracle`]; the `method` field
/// records which rule decided it.
pub fn is_feasible(census: Census, ward: &WardConfig) -> FeasibilityVerdict {
    if census.total() > ward.total_capacity() {
        return FeasibilityVerdict::capacity_exceeded();
    }
    let family = classify(ward);
    let verdict = match family {
        CapacityFamily::ConstantCapacity { .. } => check_constant_capacity(census, ward),
        CapacityFamily::SinglesPlusConstant { .. } => check_singles_plus_constant(census, ward),
        CapacityFamily::EvenPair { .. } => check_even_pair(census, ward),
        CapacityFamily::AllSizesOneToN { .. } => check_all_sizes_one_to_n(census, ward),
        CapacityFamily::PowersOfTwo { .. } => check_powers_of_two(census, ward),
        CapacityFamily::ScaledFamily { scalar, .. } => check_scaled_family(census, ward, scalar),
        CapacityFamily::FrobeniusCoprime { .. } => check_frobenius_coprime(census, ward),
        CapacityFamily::Chain => check_chain(census, ward),
        CapacityFamily::Superincreasing => check_superincreasing(census, ward),
        CapacityFamily::Arithmetic { .. } => check_arithmetic(census, ward),
        CapacityFamily::SubsetSumOracle => return subset_sum_oracle(census, ward),
    };
    // classify only returns families whose preconditions hold
    verdict.unwrap_or_else(|_| subset_sum_oracle(census, ward))
}

pub(crate) fn ceil_div(value: u64, divisor: u64) -> u64 {
    value.div_ceil(divisor)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ward(caps: &[u32]) -> WardConfig {
        WardConfig::from_capacities(caps).unwrap()
    }

    #[test]
    fn empty_census_is_always_feasible() {
        for caps in [&[1][..], &[2, 2, 4], &[3, 5, 7, 11], &[6]] {
            let v = is_feasible(Census::new(0, 0), &ward(caps));
            assert!(v.feasible);
            assert!(v.witness_is_sound(Census::new(0, 0), &ward(caps)));
        }
    }

    #[test]
    fn one_room_two_genders() {
        let v = is_feasible(Census::new(1, 1), &ward(&[2]));
        assert!(!v.feasible);
        assert_eq!(v.method, Method::ConstantCapacity);
    }

    #[test]
    fn scaled_family_dispatch() {
        let w = ward(&[2, 2, 4]);
        let v = is_feasible(Census::new(4, 4), &w);
        assert!(v.feasible);
        assert_eq!(v.method, Method::ScaledFamily);
        assert!(v.witness_is_sound(Census::new(4, 4), &w));
    }

    #[test]
    fn capacity_exceeded_short_circuit() {
        let v = is_feasible(Census::new(6, 10), &ward(&[1, 2, 4, 8]));
        assert!(!v.feasible);
        assert_eq!(v.method, Method::CapacityExceeded);
        assert_eq!(v.witness, None);
    }

    #[test]
    fn witness_soundness_rejects_duplicates() {
        let w = ward(&[3, 3]);
        let bogus = FeasibilityVerdict {
            feasible: true,
            method: Method::SubsetSumOracle,
            witness: Some(vec![0, 0]),
        };
        assert!(!bogus.witness_is_sound(Census::new(6, 0), &w));
    }
}
