//! Closed-form criteria: constant capacities, singles plus one size, the even
//! pair, capacities `{1..n}` or `{2^0..2^n}`, and their scalar multiples.

use std::collections::BTreeMap;

use super::family::{all_sizes, even_pair, powers_of_two, scaled_case, singles_plus_constant};
use super::{
    ceil_div, misclassified, Census, FeasibilityError, FeasibilityVerdict, Method, ScaledCase,
    WardConfig,
};

fn distinct_of(ward: &WardConfig) -> Vec<(u32, u32)> {
    ward.distinct().iter().map(|(&c, &n)| (c, n)).collect()
}

/// `⌈F/c⌉ + ⌈M/c⌉ ≤ |R|` for a ward whose rooms all have `c` beds.
pub fn check_constant_capacity(
    census: Census,
    ward: &WardConfig,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    let distinct = distinct_of(ward);
    let [(capacity, _)] = distinct[..] else {
        return Err(misclassified(
            "ConstantCapacity",
            ward,
            "rooms have mixed capacities",
        ));
    };
    if census.total() > ward.total_capacity() {
        return Ok(FeasibilityVerdict::capacity_exceeded());
    }
    let c = u64::from(capacity);
    let female_rooms = ceil_div(u64::from(census.females), c);
    let male_rooms = ceil_div(u64::from(census.males), c);
    if female_rooms + male_rooms <= ward.room_count() as u64 {
        Ok(FeasibilityVerdict::feasible(
            Method::ConstantCapacity,
            (0..female_rooms as usize).collect(),
        ))
    } else {
        Ok(FeasibilityVerdict::infeasible(Method::ConstantCapacity))
    }
}

/// Capacities `{1, c}` with at least `c − 1` single rooms: feasible exactly
/// when the census fits the total capacity.
pub fn check_singles_plus_constant(
    census: Census,
    ward: &WardConfig,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    if singles_plus_constant(&distinct_of(ward)).is_none() {
        return Err(misclassified(
            "SinglesPlusConstant",
            ward,
            "capacities must be {1, c} with c ≥ 2 and at least c − 1 single rooms",
        ));
    }
    if census.total() > ward.total_capacity() {
        return Ok(FeasibilityVerdict::capacity_exceeded());
    }
    let caps = unit_capacities(ward, 1);
    let witness = exact_sum_singles(&caps, u64::from(census.females))
        .expect("singles cover every remainder below the large capacity");
    Ok(FeasibilityVerdict::feasible(
        Method::SinglesPlusConstant,
        witness,
    ))
}

/// Capacities `{2, 2c}`, `c ≥ 2`, with at least `c − 1` double rooms.
///
/// Feasible iff both counts are even and fit the total, or the census is
/// strictly below the total.
pub fn check_even_pair(
    census: Census,
    ward: &WardConfig,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    if even_pair(&distinct_of(ward)).is_none() {
        return Err(misclassified(
            "EvenPair",
            ward,
            "capacities must be {2, 2c} with c ≥ 2 and at least c − 1 double rooms",
        ));
    }
    let total = ward.total_capacity();
    if census.total() > total {
        return Ok(FeasibilityVerdict::capacity_exceeded());
    }
    let both_even = census.females.is_multiple_of(2) && census.males.is_multiple_of(2);
    if !(both_even || census.total() < total) {
        return Ok(FeasibilityVerdict::infeasible(Method::EvenPair));
    }
    // halving every room gives the singles-plus-constant ward {1, c}
    let caps = unit_capacities(ward, 2);
    let witness = exact_sum_singles(&caps, ceil_div(u64::from(census.females), 2))
        .expect("halved ward covers every target up to its total");
    Ok(FeasibilityVerdict::feasible(Method::EvenPair, witness))
}

/// Capacities exactly `{1, …, n}` (each present): feasible iff `F + M` fits.
///
/// The witness holds exactly `F` beds and is grown one bed at a time: either
/// a free single room is added, or a chosen room of size `c − 1` is traded
/// for the smallest free room of size `c`.
pub fn check_all_sizes_one_to_n(
    census: Census,
    ward: &WardConfig,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    if all_sizes(&distinct_of(ward)).is_none() {
        return Err(misclassified(
            "AllSizesOneToN",
            ward,
            "distinct capacities must be exactly 1, 2, …, n",
        ));
    }
    if census.total() > ward.total_capacity() {
        return Ok(FeasibilityVerdict::capacity_exceeded());
    }
    let caps = unit_capacities(ward, 1);
    let witness = exact_sum_all_sizes(&caps, u64::from(census.females))
        .expect("every size below the smallest free room is chosen");
    Ok(FeasibilityVerdict::feasible(
        Method::AllSizesOneToN,
        witness,
    ))
}

/// Capacities exactly `{2^0, …, 2^n}` (each present): feasible iff `F + M`
/// fits. The witness step trades one chosen room of each size below `2^ℓ`
/// (together `2^ℓ − 1` beds) for a free room of size `2^ℓ`.
pub fn check_powers_of_two(
    census: Census,
    ward: &WardConfig,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    if powers_of_two(&distinct_of(ward)).is_none() {
        return Err(misclassified(
            "PowersOfTwo",
            ward,
            "distinct capacities must be exactly 1, 2, 4, …, 2^n",
        ));
    }
    if census.total() > ward.total_capacity() {
        return Ok(FeasibilityVerdict::capacity_exceeded());
    }
    let caps = unit_capacities(ward, 1);
    let witness = exact_sum_powers_of_two(&caps, u64::from(census.females))
        .expect("every smaller power is chosen when the smallest free room is 2^l");
    Ok(FeasibilityVerdict::feasible(Method::PowersOfTwo, witness))
}

/// Capacities that are `a` times one of the shapes `{1, n}` (with
/// `R_a ≥ n − 1`), `{1..n}` or `{2^0..2^n}`.
///
/// Feasible iff `⌈F/a⌉ + ⌈M/a⌉ ≤ Σc / a`. The witness solves the reduced
/// ward `c / a` for `⌈F/a⌉` patients and reuses the same rooms.
pub fn check_scaled_family(
    census: Census,
    ward: &WardConfig,
    scalar: u32,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    let Some(case) = scaled_case(&distinct_of(ward), scalar) else {
        return Err(misclassified(
            "ScaledFamily",
            ward,
            format!("capacities are not a = {scalar} times a covered shape"),
        ));
    };
    let total = ward.total_capacity();
    if census.total() > total {
        return Ok(FeasibilityVerdict::capacity_exceeded());
    }
    let a = u64::from(scalar);
    let female_units = ceil_div(u64::from(census.females), a);
    let male_units = ceil_div(u64::from(census.males), a);
    if female_units + male_units > total / a {
        return Ok(FeasibilityVerdict::infeasible(Method::ScaledFamily));
    }
    let caps = unit_capacities(ward, scalar);
    let witness = match case {
        ScaledCase::TwoSizes { .. } => exact_sum_singles(&caps, female_units),
        ScaledCase::Multiples { .. } => exact_sum_all_sizes(&caps, female_units),
        ScaledCase::PowersOfTwo { .. } => exact_sum_powers_of_two(&caps, female_units),
    }
    .expect("reduced ward reaches every target up to its total");
    Ok(FeasibilityVerdict::feasible(Method::ScaledFamily, witness))
}

/// Splits every room into rooms of `unit` beds (the auxiliary ward of the
/// scaled reduction). Fails when `unit` does not divide every capacity.
pub fn split_into_units(ward: &WardConfig, unit: u32) -> Result<WardConfig, FeasibilityError> {
    if unit == 0 {
        return Err(FeasibilityError::NonPositive);
    }
    if ward.capacities().any(|c| c % unit != 0) {
        return Err(misclassified(
            "ScaledFamily",
            ward,
            format!("{unit} does not divide every capacity"),
        ));
    }
    let pieces = (ward.total_capacity() / u64::from(unit)) as usize;
    WardConfig::from_capacities(&vec![unit; pieces])
}

fn unit_capacities(ward: &WardConfig, unit: u32) -> Vec<u64> {
    ward.capacities().map(|c| u64::from(c / unit)).collect()
}

/// Rooms grouped by capacity, each group split into chosen and free rooms.
struct Selection {
    chosen: BTreeMap<u64, Vec<usize>>,
    free: BTreeMap<u64, Vec<usize>>,
}

impl Selection {
    fn new(caps: &[u64]) -> Self {
        let mut free: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        // reversed so that pop() yields the lowest room index first
        for (i, &c) in caps.iter().enumerate().rev() {
            free.entry(c).or_default().push(i);
        }
        Self {
            chosen: BTreeMap::new(),
            free,
        }
    }

    fn pop_smallest_free(&mut self) -> Option<(u64, usize)> {
        let mut entry = self.free.first_entry()?;
        let capacity = *entry.key();
        let room = entry.get_mut().pop().expect("groups are never empty");
        if entry.get().is_empty() {
            entry.remove();
        }
        Some((capacity, room))
    }

    fn take(map: &mut BTreeMap<u64, Vec<usize>>, capacity: u64) -> Option<usize> {
        let group = map.get_mut(&capacity)?;
        let room = group.pop()?;
        if group.is_empty() {
            map.remove(&capacity);
        }
        Some(room)
    }

    fn choose(&mut self, capacity: u64, room: usize) {
        self.chosen.entry(capacity).or_default().push(room);
    }

    fn release(&mut self, capacity: u64) -> Option<usize> {
        let room = Self::take(&mut self.chosen, capacity)?;
        self.free.entry(capacity).or_default().push(room);
        Some(room)
    }

    fn take_free(&mut self, capacity: u64) -> Option<usize> {
        Self::take(&mut self.free, capacity)
    }

    fn into_chosen(self) -> Vec<usize> {
        let mut rooms: Vec<usize> = self.chosen.into_values().flatten().collect();
        rooms.sort_unstable();
        rooms
    }
}

/// Exact-sum subset for capacities `{1, c}` with enough single rooms.
fn exact_sum_singles(caps: &[u64], target: u64) -> Option<Vec<usize>> {
    let large = caps.iter().copied().max()?;
    let mut selection = Selection::new(caps);
    let mut remaining = target;
    if large > 1 {
        while remaining >= large {
            match selection.take_free(large) {
                Some(room) => {
                    selection.choose(large, room);
                    remaining -= large;
                }
                None => break,
            }
        }
    }
    while remaining > 0 {
        let room = selection.take_free(1)?;
        selection.choose(1, room);
        remaining -= 1;
    }
    Some(selection.into_chosen())
}

fn exact_sum_all_sizes(caps: &[u64], target: u64) -> Option<Vec<usize>> {
    let mut selection = Selection::new(caps);
    for _ in 0..target {
        let (capacity, room) = selection.pop_smallest_free()?;
        if capacity > 1 {
            selection.release(capacity - 1)?;
        }
        selection.choose(capacity, room);
    }
    Some(selection.into_chosen())
}

fn exact_sum_powers_of_two(caps: &[u64], target: u64) -> Option<Vec<usize>> {
    let mut selection = Selection::new(caps);
    for _ in 0..target {
        let (capacity, room) = selection.pop_smallest_free()?;
        let mut smaller = 1u64;
        while smaller < capacity {
            selection.release(smaller)?;
            smaller <<= 1;
        }
        selection.choose(capacity, room);
    }
    Some(selection.into_chosen())
}
