use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::FeasibilityError;

/// Largest accepted bed count for a single room.
pub const MAX_CAPACITY: u32 = i32::MAX as u32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Room {
    pub id: String,
    pub capacity: u32,
}

/// The rooms of a ward together with their bed counts.
///
/// Room order is significant: witnesses returned by the feasibility checks are
/// indices into [`WardConfig::rooms`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Room>", into = "Vec<Room>")]
pub struct WardConfig {
    rooms: Vec<Room>,
    counts: BTreeMap<u32, u32>,
    total: u64,
}

impl WardConfig {
    pub fn new(rooms: Vec<Room>) -> Result<Self, FeasibilityError> {
        if rooms.is_empty() {
            return Err(FeasibilityError::EmptyWard);
        }
        let mut seen = HashSet::with_capacity(rooms.len());
        let mut counts = BTreeMap::new();
        let mut total = 0u64;
        for room in &rooms {
            if room.capacity == 0 || room.capacity > MAX_CAPACITY {
                return Err(FeasibilityError::InvalidCapacity {
                    room: room.id.clone(),
                    capacity: room.capacity,
                });
            }
            if !seen.insert(room.id.as_str()) {
                return Err(FeasibilityError::DuplicateRoomId(room.id.clone()));
            }
            *counts.entry(room.capacity).or_insert(0) += 1;
            total += u64::from(room.capacity);
        }
        Ok(Self {
            rooms,
            counts,
            total,
        })
    }

    /// Builds a ward with rooms named `R1`, `R2`, ... in the given order.
    pub fn from_capacities(capacities: &[u32]) -> Result<Self, FeasibilityError> {
        Self::new(
            capacities
                .iter()
                .enumerate()
                .map(|(i, &capacity)| Room {
                    id: format!("R{}", i + 1),
                    capacity,
                })
                .collect(),
        )
    }

    pub fn rooms(&self) -> &[Room] {
        &self.rooms
    }

    pub fn capacities(&self) -> impl ExactSizeIterator<Item = u32> + '_ {
        self.rooms.iter().map(|r| r.capacity)
    }

    pub fn capacity_list(&self) -> Vec<u32> {
        self.capacities().collect()
    }

    pub fn total_capacity(&self) -> u64 {
        self.total
    }

    pub fn room_count(&self) -> usize {
        self.rooms.len()
    }

    /// `R_c`: the number of rooms with exactly `capacity` beds.
    pub fn count_of(&self, capacity: u32) -> u32 {
        self.counts.get(&capacity).copied().unwrap_or(0)
    }

    /// Distinct capacities in ascending order with their multiplicities.
    pub fn distinct(&self) -> &BTreeMap<u32, u32> {
        &self.counts
    }

    /// Room indices sorted by ascending capacity; ties keep room order.
    pub fn indices_by_capacity(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.rooms.len()).collect();
        idx.sort_by_key(|&i| self.rooms[i].capacity);
        idx
    }

    /// Sum of capacities over a set of room indices.
    pub fn capacity_of(&self, rooms: &[usize]) -> u64 {
        rooms
            .iter()
            .map(|&i| u64::from(self.rooms[i].capacity))
            .sum()
    }
}

impl TryFrom<Vec<Room>> for WardConfig {
    type Error = FeasibilityError;

    fn try_from(rooms: Vec<Room>) -> Result<Self, Self::Error> {
        Self::new(rooms)
    }
}

impl From<WardConfig> for Vec<Room> {
    fn from(ward: WardConfig) -> Self {
        ward.rooms
    }
}

impl fmt::Display for WardConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.capacities().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

/// Female and male patients present on one day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Census {
    pub females: u32,
    pub males: u32,
}

impl Census {
    pub fn new(females: u32, males: u32) -> Self {
        Self { females, males }
    }

    pub fn total(&self) -> u64 {
        u64::from(self.females) + u64::from(self.males)
    }

    pub fn swapped(&self) -> Self {
        Self {
            females: self.males,
            males: self.females,
        }
    }
}

impl fmt::Display for Census {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(F={}, M={})", self.females, self.males)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_counts() {
        let ward = WardConfig::from_capacities(&[2, 2, 4, 1]).unwrap();
        assert_eq!(ward.total_capacity(), 9);
        assert_eq!(ward.room_count(), 4);
        assert_eq!(ward.count_of(2), 2);
        assert_eq!(ward.count_of(3), 0);
        let by_distinct: u64 = ward
            .distinct()
            .iter()
            .map(|(&c, &n)| u64::from(c) * u64::from(n))
            .sum();
        assert_eq!(by_distinct, ward.total_capacity());
        assert_eq!(ward.indices_by_capacity(), vec![3, 0, 1, 2]);
    }

    #[test]
    fn rejects_invalid_wards() {
        assert!(matches!(
            WardConfig::from_capacities(&[]),
            Err(FeasibilityError::EmptyWard)
        ));
        assert!(matches!(
            WardConfig::from_capacities(&[2, 0]),
            Err(FeasibilityError::InvalidCapacity { .. })
        ));
        let dup = vec![
            Room {
                id: "a".into(),
                capacity: 1,
            },
            Room {
                id: "a".into(),
                capacity: 2,
            },
        ];
        assert!(matches!(
            WardConfig::new(dup),
            Err(FeasibilityError::DuplicateRoomId(_))
        ));
    }

    #[test]
    fn serde_as_room_list() {
        let ward = WardConfig::from_capacities(&[1, 3]).unwrap();
        let json = serde_json::to_string(&ward).unwrap();
        assert_eq!(
            json,
            r#"[{"id":"R1","capacity":1},{"id":"R2","capacity":3}]"#
        );
        let back: WardConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ward);
        assert!(serde_json::from_str::<WardConfig>("[]").is_err());
    }
}
