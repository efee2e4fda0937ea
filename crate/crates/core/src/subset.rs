//! Subsets of the coordinate index range `[m]`, stored as bitmasks.
//!
//! Bit `i` stands for coordinate `i + 1`; everything user-facing (display,
//! serde) uses 1-based indices.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest ambient dimension representable by [`IndexSet`].
pub const MAX_DIMENSION: usize = 32;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(u32);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn from_bits(bits: u32) -> Self {
        Self(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `[m] = {1, …, m}`.
    pub fn full(m: usize) -> Self {
        assert!(m <= MAX_DIMENSION);
        if m == MAX_DIMENSION {
            Self(u32::MAX)
        } else {
            Self((1u32 << m) - 1)
        }
    }

    /// Builds a set from 1-based indices. Returns the offending index when one
    /// is zero or exceeds [`MAX_DIMENSION`].
    pub fn from_one_based<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self, usize> {
        let mut bits = 0u32;
        for i in indices {
            if i == 0 || i > MAX_DIMENSION {
                return Err(i);
            }
            bits |= 1 << (i - 1);
        }
        Ok(Self(bits))
    }

    pub fn from_zero_based<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Self(indices.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, zero_based: usize) -> bool {
        zero_based < MAX_DIMENSION && self.0 & (1 << zero_based) != 0
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Self(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        Self(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Largest 1-based index present, or 0 for the empty set.
    pub fn max_one_based(self) -> usize {
        (u32::BITS - self.0.leading_zeros()) as usize
    }

    pub fn iter_zero_based(self) -> impl Iterator<Item = usize> {
        (0..MAX_DIMENSION).filter(move |&i| self.contains(i))
    }

    pub fn to_one_based(self) -> Vec<usize> {
        self.iter_zero_based().map(|i| i + 1).collect()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, i) in self.to_one_based().into_iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_one_based().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<usize>::deserialize(deserializer)?;
        IndexSet::from_one_based(raw).map_err(|i| {
            serde::de::Error::custom(format!(
                "index {i} is outside the supported range 1..={MAX_DIMENSION}"
            ))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = IndexSet::from_one_based([1, 2]).unwrap();
        let b = IndexSet::from_one_based([2, 3]).unwrap();
        assert_eq!(a.intersection(b).to_one_based(), vec![2]);
        assert_eq!(a.union(b).to_one_based(), vec![1, 2, 3]);
        assert_eq!(a.difference(b).to_one_based(), vec![1]);
        assert!(a.is_subset(IndexSet::full(3)));
        assert!(!a.is_subset(b));
        assert_eq!(a.to_string(), "{1,2}");
        assert_eq!(IndexSet::EMPTY.to_string(), "{}");
        assert_eq!(b.max_one_based(), 3);
        assert_eq!(IndexSet::from_one_based([0]), Err(0));
    }

    #[test]
    fn serde_uses_one_based_lists() {
        let a = IndexSet::from_one_based([1, 3]).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), "[1,3]");
        let back: IndexSet = serde_json::from_str("[3,1]").unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<IndexSet>("[0]").is_err());
    }
}
