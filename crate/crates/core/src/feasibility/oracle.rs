use super::{Census, FeasibilityVerdict, Method, WardConfig};

const UNREACHED: u32 = u32::MAX;
const EMPTY: u32 = u32::MAX - 1;

/// For every bed total `s ∈ 0..=Σc`, the room whose addition first reached
/// `s`, or `None` if no subset of rooms sums to `s`.
///
/// Rooms are processed in order and each pass walks sums downwards, so the
/// predecessor `s − c_r` of a recorded entry was reached by rooms before `r`.
/// Following the entries back therefore yields distinct rooms.
struct ReachableSums {
    first_room: Vec<u32>,
}

impl ReachableSums {
    fn build(ward: &WardConfig) -> Self {
        let total = ward.total_capacity() as usize;
        let mut first_room = vec![UNREACHED; total + 1];
        first_room[0] = EMPTY;
        let mut reached = 0usize;
        for (room, c) in ward.capacities().enumerate() {
            let c = c as usize;
            for s in (c..=reached + c).rev() {
                if first_room[s] == UNREACHED && first_room[s - c] != UNREACHED {
                    first_room[s] = room as u32;
                }
            }
            reached += c;
        }
        Self { first_room }
    }

    fn is_reachable(&self, sum: usize) -> bool {
        self.first_room[sum] != UNREACHED
    }

    fn rooms_for(&self, ward: &WardConfig, mut sum: usize) -> Vec<usize> {
        let mut rooms = Vec::new();
        while sum > 0 {
            let room = self.first_room[sum] as usize;
            rooms.push(room);
            sum -= ward.rooms()[room].capacity as usize;
        }
        rooms
    }
}

/// All subset sums of the ward's capacities, ascending.
pub fn reachable_sums(ward: &WardConfig) -> Vec<u64> {
    let table = ReachableSums::build(ward);
    (0..table.first_room.len())
        .filter(|&s| table.is_reachable(s))
        .map(|s| s as u64)
        .collect()
}

/// Reference decision procedure: feasible iff some subset of rooms has a bed
/// total `b` with `F ≤ b ≤ Σc − M`. The witness uses the smallest such `b`.
///
/// Runs in `O(|R| · Σc)` time and `O(Σc)` memory.
pub fn subset_sum_oracle(census: Census, ward: &WardConfig) -> FeasibilityVerdict {
    let total = ward.total_capacity();
    if census.total() > total {
        return FeasibilityVerdict::capacity_exceeded();
    }
    let table = ReachableSums::build(ward);
    let lo = census.females as usize;
    let hi = (total - u64::from(census.males)) as usize;
    match (lo..=hi).find(|&b| table.is_reachable(b)) {
        Some(b) => FeasibilityVerdict::feasible(Method::SubsetSumOracle, table.rooms_for(ward, b)),
        None => FeasibilityVerdict::infeasible(Method::SubsetSumOracle),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ward(caps: &[u32]) -> WardConfig {
        WardConfig::from_capacities(caps).unwrap()
    }

    fn enumerate_sums(caps: &[u32]) -> Vec<u64> {
        let mut sums: Vec<u64> = (0u32..1 << caps.len())
            .map(|mask| {
                (0..caps.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| u64::from(caps[i]))
                    .sum()
            })
            .collect();
        sums.sort_unstable();
        sums.dedup();
        sums
    }

    #[test]
    fn oracle_examples() {
        let w = ward(&[2, 2, 2]);
        assert_eq!(enumerate_sums(&[2, 2, 2]), vec![0, 2, 4, 6]);
        assert_eq!(reachable_sums(&w), vec![0, 2, 4, 6]);
        assert!(!subset_sum_oracle(Census::new(3, 3), &w).feasible);

        assert!(!subset_sum_oracle(Census::new(1, 1), &ward(&[5])).feasible);

        let w = ward(&[3, 5]);
        let v = subset_sum_oracle(Census::new(5, 3), &w);
        assert!(v.feasible);
        assert_eq!(v.witness, Some(vec![1]));
    }

    #[test]
    fn reachable_sums_match_enumeration() {
        for caps in [&[3u32, 5, 7, 11][..], &[1, 1, 1], &[6, 4, 4, 9, 2], &[13]] {
            assert_eq!(reachable_sums(&ward(caps)), enumerate_sums(caps));
        }
    }

    #[test]
    fn witness_uses_smallest_total() {
        let w = ward(&[4, 3, 6]);
        let v = subset_sum_oracle(Census::new(5, 0), &w);
        // 6 is the smallest reachable total >= 5
        assert_eq!(w.capacity_of(v.witness.as_ref().unwrap()), 6);
    }

    #[test]
    fn capacity_exceeded() {
        let v = subset_sum_oracle(Census::new(4, 4), &ward(&[3, 4]));
        assert_eq!(v.method, Method::CapacityExceeded);
    }
}
