//! Families of subsets `A_1, …, A_ℓ` of `[m]` partitioned into blocks
//! `B_1, …, B_s`, with the combinatorial quantities the construction and its
//! optimality criteria depend on.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::projgeom::projective_count;
use crate::subset::{IndexSet, MAX_DIMENSION};

/// Largest block size accepted by the inclusion-exclusion evaluation
/// (it visits every nonempty sub-collection of a block).
pub const MAX_BLOCK_LEN: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("a family needs at least one block")]
    NoBlocks,
    #[error("invalid ambient dimension {0}")]
    InvalidDimension(usize),
    #[error("block {block}, subset {subset}: index {index} is outside [1, {m}]")]
    IndexOutOfRange {
        block: usize,
        subset: usize,
        index: usize,
        m: usize,
    },
    #[error("block has {0} subsets, more than the supported {MAX_BLOCK_LEN}")]
    BlockTooLarge(usize),
    #[error("integer overflow while evaluating {0}")]
    Overflow(&'static str),
}

/// Subsets of `[m]` grouped into blocks. Empty subsets are dropped on
/// construction; each drop is recorded in [`SubsetFamily::log`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsetFamily {
    m: usize,
    blocks: Vec<Vec<IndexSet>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    log: Vec<String>,
}

impl SubsetFamily {
    pub fn new(m: usize, blocks: Vec<Vec<IndexSet>>) -> Result<Self, FamilyError> {
        if m == 0 || m > MAX_DIMENSION {
            return Err(FamilyError::InvalidDimension(m));
        }
        if blocks.is_empty() {
            return Err(FamilyError::NoBlocks);
        }
        let full = IndexSet::full(m);
        let mut log = Vec::new();
        let mut kept = Vec::with_capacity(blocks.len());
        for (b, block) in blocks.into_iter().enumerate() {
            let mut out = Vec::with_capacity(block.len());
            for (i, a) in block.into_iter().enumerate() {
                if !a.is_subset(full) {
                    return Err(FamilyError::IndexOutOfRange {
                        block: b + 1,
                        subset: i + 1,
                        index: a.max_one_based(),
                        m,
                    });
                }
                if a.is_empty() {
                    log.push(format!("block {}: dropped empty subset #{}", b + 1, i + 1));
                } else {
                    out.push(a);
                }
            }
            if out.is_empty() {
                log.push(format!(
                    "block {}: no subsets removed, the block is a full copy of P_[{m}]",
                    b + 1
                ));
            }
            if out.len() > MAX_BLOCK_LEN {
                return Err(FamilyError::BlockTooLarge(out.len()));
            }
            kept.push(out);
        }
        Ok(Self {
            m,
            blocks: kept,
            log,
        })
    }

    /// Convenience constructor from 1-based index lists.
    pub fn from_one_based(m: usize, blocks: &[Vec<Vec<usize>>]) -> Result<Self, FamilyError> {
        let mut sets = Vec::with_capacity(blocks.len());
        for (b, block) in blocks.iter().enumerate() {
            let mut out = Vec::with_capacity(block.len());
            for (i, subset) in block.iter().enumerate() {
                let set = IndexSet::from_one_based(subset.iter().copied()).map_err(|index| {
                    FamilyError::IndexOutOfRange {
                        block: b + 1,
                        subset: i + 1,
                        index,
                        m,
                    }
                })?;
                out.push(set);
            }
            sets.push(out);
        }
        Self::new(m, sets)
    }

    /// One block, nothing removed: the defining set is all of `P_[m]`.
    pub fn simplex(m: usize) -> Result<Self, FamilyError> {
        Self::new(m, vec![Vec::new()])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn blocks(&self) -> &[Vec<IndexSet>] {
        &self.blocks
    }

    /// Number of blocks `s`.
    pub fn s(&self) -> usize {
        self.blocks.len()
    }

    /// Flattened view `A_1, …, A_ℓ`.
    pub fn subsets(&self) -> impl Iterator<Item = IndexSet> + '_ {
        self.blocks.iter().flatten().copied()
    }

    /// Total number of subsets `ℓ`.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn log(&self) -> &[String] {
        &self.log
    }

    pub fn to_one_based(&self) -> Vec<Vec<Vec<usize>>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|a| a.to_one_based()).collect())
            .collect()
    }

    /// True when the subsets inside every block are pairwise disjoint.
    pub fn blocks_disjoint(&self) -> Vec<bool> {
        self.blocks.iter().map(|b| pairwise_disjoint(b)).collect()
    }

    pub fn property_is(&self) -> PropertyIs {
        let removed = self
            .blocks
            .iter()
            .fold(IndexSet::EMPTY, |acc, b| acc.union(center(b)));
        let witnesses: Vec<Option<usize>> = self
            .subsets()
            .map(|a| {
                a.difference(removed)
                    .iter_zero_based()
                    .next()
                    .map(|i| i + 1)
            })
            .collect();
        PropertyIs {
            holds: witnesses.iter().all(Option::is_some),
            centers_union: removed,
            witnesses,
        }
    }

    /// Hypotheses under which the closed-form parameters hold: Property I_s
    /// and `p^{m−1} > Σ_i p^{|B_i^{(r)}|−1}` for every block.
    pub fn construction_hypotheses(&self, p: u32) -> ConstructionHypotheses {
        let top = (p as u128).checked_pow(self.m as u32 - 1);
        let block_bounds = self
            .blocks
            .iter()
            .map(|b| {
                let sum = b
                    .iter()
                    .try_fold(0u128, |acc, a| {
                        acc.checked_add((p as u128).checked_pow(a.len() as u32 - 1)?)
                    });
                matches!((top, sum), (Some(t), Some(s)) if t > s)
            })
            .collect::<Vec<_>>();
        let property_is = self.property_is().holds;
        ConstructionHypotheses {
            holds: property_is && block_bounds.iter().all(|&b| b),
            property_is,
            block_bounds,
        }
    }

    /// Closed-form `[n, k, d]` for the construction, valid under
    /// [`SubsetFamily::construction_hypotheses`]. `d` may come out
    /// nonpositive when the hypotheses fail.
    pub fn predicted_parameters(&self, p: u32) -> Result<PredictedParameters, FamilyError> {
        let per_copy = projective_count(p, self.m) as i128;
        let mut complement = 0i128;
        for b in &self.blocks {
            complement += pie_complement_size(b, p)? as i128;
        }
        let n = self.s() as i128 * per_copy - complement;
        let top = checked_pow(p, self.m - 1)?;
        let removed = self.sum_powers(p, 1)?;
        let d = self.s() as i128 * top - removed;
        Ok(PredictedParameters {
            n,
            k: self.m,
            d,
            complement_total: complement,
        })
    }

    /// `Σ_i p^{|A_i| − shift}` for `shift ∈ {0, 1}`.
    pub fn sum_powers(&self, p: u32, shift: usize) -> Result<i128, FamilyError> {
        self.subsets().try_fold(0i128, |acc, a| {
            acc.checked_add(checked_pow(p, a.len() - shift)?)
                .ok_or(FamilyError::Overflow("power sum"))
        })
    }
}

fn checked_pow(p: u32, e: usize) -> Result<i128, FamilyError> {
    (p as i128)
        .checked_pow(e as u32)
        .ok_or(FamilyError::Overflow("prime power"))
}

fn pairwise_disjoint(block: &[IndexSet]) -> bool {
    let mut seen = IndexSet::EMPTY;
    for &a in block {
        if !a.intersection(seen).is_empty() {
            return false;
        }
        seen = seen.union(a);
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyIs {
    pub holds: bool,
    /// `⋃_j Center(B_j)`
    pub centers_union: IndexSet,
    /// Per flattened subset: a surviving 1-based index, or `None` when the
    /// subset is swallowed by the centers.
    pub witnesses: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionHypotheses {
    pub holds: bool,
    pub property_is: bool,
    pub block_bounds: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictedParameters {
    pub n: i128,
    pub k: usize,
    pub d: i128,
    pub complement_total: i128,
}

/// `Center(E) = ⋃_{i<j} (E_i ∩ E_j)`; empty for fewer than two sets.
pub fn center(subsets: &[IndexSet]) -> IndexSet {
    let mut seen = IndexSet::EMPTY;
    let mut out = IndexSet::EMPTY;
    for &a in subsets {
        out = out.union(a.intersection(seen));
        seen = seen.union(a);
    }
    out
}

/// `|⋃_j P_{B_j}|` by inclusion-exclusion:
/// `(Σ_k (−1)^{k−1} Σ_{i_1<…<i_k} p^{|B_{i_1} ∩ … ∩ B_{i_k}|} − 1) / (p − 1)`.
pub fn pie_complement_size(block: &[IndexSet], p: u32) -> Result<u64, FamilyError> {
    if block.is_empty() {
        return Ok(0);
    }
    if block.len() > MAX_BLOCK_LEN {
        return Err(FamilyError::BlockTooLarge(block.len()));
    }
    let mut total: i128 = 0;
    for mask in 1u32..(1 << block.len()) {
        let inter = (0..block.len())
            .filter(|i| mask & (1 << i) != 0)
            .fold(IndexSet::full(MAX_DIMENSION), |acc, i| {
                acc.intersection(block[i])
            });
        let term = checked_pow(p, inter.len())?;
        if mask.count_ones() % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    let numerator = total - 1;
    debug_assert_eq!(numerator % (p as i128 - 1), 0);
    u64::try_from(numerator / (p as i128 - 1)).map_err(|_| FamilyError::Overflow("PIE size"))
}

/// The p-adic statistics of `Σ_i p^{|A_i|−1}` and the size multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyStats {
    /// `M`: the largest number of subsets sharing one size.
    pub max_multiplicity: usize,
    /// `C`: digit sum of the p-adic expansion.
    pub digit_sum: u64,
    /// `v_p`: index of the lowest nonzero digit. Zero for an empty family.
    pub valuation: usize,
    /// Digits `b_g, …, b_h` from the lowest nonzero position upward.
    pub digits: Vec<u32>,
    /// Subset size → number of subsets of that size.
    pub size_counts: BTreeMap<usize, usize>,
}

pub fn family_stats(fam: &SubsetFamily, p: u32) -> FamilyStats {
    let mut size_counts = BTreeMap::new();
    for a in fam.subsets() {
        *size_counts.entry(a.len()).or_insert(0usize) += 1;
    }
    let max_multiplicity = size_counts.values().copied().max().unwrap_or(0);

    // Exponents |A_i| - 1 accumulate into a digit array; carries then bring
    // every position into [0, p).
    let mut digits: Vec<u64> = vec![0; fam.m()];
    for a in fam.subsets() {
        digits[a.len() - 1] += 1;
    }
    let mut pos = 0;
    while pos < digits.len() {
        let carry = digits[pos] / p as u64;
        digits[pos] %= p as u64;
        if carry > 0 {
            if pos + 1 == digits.len() {
                digits.push(0);
            }
            digits[pos + 1] += carry;
        }
        pos += 1;
    }
    let low = digits.iter().position(|&b| b != 0);
    let high = digits.iter().rposition(|&b| b != 0);
    let (valuation, kept) = match (low, high) {
        (Some(g), Some(h)) => (g, digits[g..=h].iter().map(|&b| b as u32).collect()),
        _ => (0, Vec::new()),
    };
    FamilyStats {
        max_multiplicity,
        digit_sum: digits.iter().sum(),
        valuation,
        digits: kept,
        size_counts,
    }
}
