//! Linear codes given by their generator-matrix columns, and the codes built
//! from projective defining sets.
//!
//! A codeword is `c_x = (x·d_1, …, x·d_n)` for `x ∈ 𝔽_p^m`. The defining-set
//! construction concatenates `s` blocks, block `r` holding the points of
//! `P_[m]` outside `⋃_j P_{B_j^{(r)}}` in canonical order.
//!
//! Character sums never appear as complex numbers: summing `ξ^{y·t}` over
//! `y ∈ 𝔽_p^*` gives `p − 1` when `t = 0` and `−1` otherwise, so every sum
//! reduces to counting zeros of `x·d`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{pie_complement_size, FamilyError, SubsetFamily};
use crate::gf::{FieldError, FpVector, PrimeField};
use crate::projgeom::{check_scale, GeometryError, ProjPoint, ProjSpace, DEFAULT_MAX_PM};
use crate::subset::IndexSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("defining set of block {block} is empty")]
    EmptyDefiningSet { block: usize },
    #[error("a code needs at least one column")]
    EmptyCode,
    #[error("enumerating p^k = {p}^{k} codewords exceeds the scale limit {limit}")]
    ScaleLimitExceeded { p: u32, k: usize, limit: u64 },
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("puncturing needs at least one position")]
    EmptySelection,
    #[error("column index {index} is out of range for length {n}")]
    PositionOutOfRange { index: usize, n: usize },
    #[error("the zero vector is not allowed here")]
    ZeroVector,
    #[error("subsets {a} and {b} must not contain each other")]
    ContainmentViolated { a: IndexSet, b: IndexSet },
    #[error("closed form invalid: {0}")]
    ClosedForm(String),
}

/// Exact weight counts, including weight 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightDistribution {
    counts: BTreeMap<usize, u64>,
}

impl WeightDistribution {
    pub fn from_counts<I: IntoIterator<Item = (usize, u64)>>(counts: I) -> Self {
        let mut map = BTreeMap::new();
        for (w, c) in counts {
            if c > 0 {
                *map.entry(w).or_insert(0) += c;
            }
        }
        Self { counts: map }
    }

    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn count(&self, weight: usize) -> u64 {
        self.counts.get(&weight).copied().unwrap_or(0)
    }

    /// Number of codewords, `p^k`.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Smallest positive weight.
    pub fn min_distance(&self) -> Option<usize> {
        self.counts.keys().copied().find(|&w| w > 0)
    }

    pub fn nonzero_weights(&self) -> Vec<usize> {
        self.counts.keys().copied().filter(|&w| w > 0).collect()
    }

    /// `1 + A_1 z + …` with zero terms omitted, e.g. `1 + 12z^13 + 10z^14`.
    pub fn enumerator(&self) -> String {
        self.counts
            .iter()
            .map(|(&w, &c)| match w {
                0 => c.to_string(),
                _ => format!("{c}z^{w}"),
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.enumerator())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParameters {
    pub n: usize,
    pub k: usize,
    /// `None` for the zero code.
    pub d: Option<usize>,
}

impl fmt::Display for CodeParameters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.d {
            Some(d) => write!(f, "[{}, {}, {}]", self.n, self.k, d),
            None => write!(f, "[{}, {}, -]", self.n, self.k),
        }
    }
}

/// A linear code over 𝔽_p given by the columns of a generator matrix,
/// optionally grouped into consecutive blocks.
#[derive(Debug)]
pub struct LinearCode {
    field: PrimeField,
    rows: usize,
    columns: Vec<FpVector>,
    blocks: Vec<Range<usize>>,
    max_pm: u64,
    rank: OnceLock<usize>,
    weights: OnceLock<WeightDistribution>,
}

impl Clone for LinearCode {
    fn clone(&self) -> Self {
        Self {
            field: self.field.clone(),
            rows: self.rows,
            columns: self.columns.clone(),
            blocks: self.blocks.clone(),
            max_pm: self.max_pm,
            rank: self.rank.clone(),
            weights: self.weights.clone(),
        }
    }
}

impl LinearCode {
    /// Single-block code from columns of length `rows`.
    pub fn from_columns(
        field: &PrimeField,
        rows: usize,
        columns: Vec<FpVector>,
    ) -> Result<Self, CodeError> {
        let n = columns.len();
        Self::with_blocks(field, rows, columns, std::iter::once(0..n).collect())
    }

    pub fn with_blocks(
        field: &PrimeField,
        rows: usize,
        columns: Vec<FpVector>,
        blocks: Vec<Range<usize>>,
    ) -> Result<Self, CodeError> {
        if columns.is_empty() {
            return Err(CodeError::EmptyCode);
        }
        for c in &columns {
            if c.len() != rows {
                return Err(CodeError::DimensionMismatch {
                    expected: rows,
                    got: c.len(),
                });
            }
            field.vector(c.coords())?;
        }
        let mut next = 0;
        for b in &blocks {
            if b.start != next || b.end < b.start {
                return Err(CodeError::PositionOutOfRange {
                    index: b.start,
                    n: columns.len(),
                });
            }
            next = b.end;
        }
        if next != columns.len() {
            return Err(CodeError::PositionOutOfRange {
                index: next,
                n: columns.len(),
            });
        }
        Ok(Self {
            field: field.clone(),
            rows,
            columns,
            blocks,
            max_pm: DEFAULT_MAX_PM,
            rank: OnceLock::new(),
            weights: OnceLock::new(),
        })
    }

    /// Sets the ceiling on `p^k` for weight enumeration.
    pub fn set_scale_limit(&mut self, max_pm: u64) {
        self.max_pm = max_pm;
        self.weights = OnceLock::new();
    }

    pub fn scale_limit(&self) -> u64 {
        self.max_pm
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    /// Number of generator rows (the message length `m`).
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> &[FpVector] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &FpVector {
        &self.columns[j]
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, column: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&column))
    }

    /// Dimension, always computed as the rank of the generator matrix.
    pub fn dimension(&self) -> usize {
        *self.rank.get_or_init(|| {
            self.field
                .matrix_rank(&self.columns)
                .expect("columns validated on construction")
        })
    }

    /// Generator rows, `rows × n`.
    pub fn generator_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|i| self.columns.iter().map(|c| c.coords()[i]).collect())
            .collect()
    }

    /// Hamming weight of `c_x`.
    pub fn weight_of(&self, x: &FpVector) -> Result<usize, CodeError> {
        if x.len() != self.rows {
            return Err(CodeError::DimensionMismatch {
                expected: self.rows,
                got: x.len(),
            });
        }
        Ok(self
            .columns
            .iter()
            .filter(|c| self.field.dot_unchecked(x.coords(), c.coords()) != 0)
            .count())
    }

    /// Exact weight distribution by enumerating all `p^k` codewords.
    ///
    /// The generator is first brought to reduced row echelon form so that
    /// each message maps to a distinct codeword. The result is memoized.
    pub fn weight_distribution(&self) -> Result<&WeightDistribution, CodeError> {
        if let Some(w) = self.weights.get() {
            return Ok(w);
        }
        let computed = self.compute_weights()?;
        // A concurrent caller may have won; both results are identical.
        let _ = self.weights.set(computed);
        Ok(self.weights.get().expect("just set"))
    }

    fn compute_weights(&self) -> Result<WeightDistribution, CodeError> {
        let basis = self.field.row_echelon(self.generator_rows());
        let k = basis.len();
        let p = self.field.p();
        check_scale(p, k, self.max_pm).map_err(|_| CodeError::ScaleLimitExceeded {
            p,
            k,
            limit: self.max_pm,
        })?;
        let n = self.columns.len();
        // Column-major copy of the reduced generator.
        let cols: Vec<Vec<u32>> = (0..n)
            .map(|j| basis.iter().map(|row| row[j]).collect())
            .collect();
        let total = (p as u64).pow(k as u32);
        let hist = scan_messages(&self.field, k, &cols, total);
        Ok(WeightDistribution::from_counts(
            hist.into_iter().enumerate(),
        ))
    }

    pub fn minimum_distance(&self) -> Result<Option<usize>, CodeError> {
        Ok(self.weight_distribution()?.min_distance())
    }

    pub fn parameters(&self) -> Result<CodeParameters, CodeError> {
        Ok(CodeParameters {
            n: self.len(),
            k: self.dimension(),
            d: self.minimum_distance()?,
        })
    }

    /// The code restricted to `positions` (sorted, duplicates ignored).
    pub fn puncture(&self, positions: &[usize]) -> Result<LinearCode, CodeError> {
        if positions.is_empty() {
            return Err(CodeError::EmptySelection);
        }
        let mut sel = positions.to_vec();
        sel.sort_unstable();
        sel.dedup();
        if let Some(&bad) = sel.iter().find(|&&j| j >= self.len()) {
            return Err(CodeError::PositionOutOfRange {
                index: bad,
                n: self.len(),
            });
        }
        let columns = sel.iter().map(|&j| self.columns[j].clone()).collect();
        let mut out = LinearCode::from_columns(&self.field, self.rows, columns)?;
        out.max_pm = self.max_pm;
        Ok(out)
    }
}

/// Histogram of codeword weights over all `total` messages of length `k`.
fn scan_messages(field: &PrimeField, k: usize, cols: &[Vec<u32>], total: u64) -> Vec<u64> {
    let n = cols.len();
    let count = |start: u64, end: u64| {
        let mut hist = vec![0u64; n + 1];
        for idx in start..end {
            let msg = field.digits(idx, k);
            let w = cols
                .iter()
                .filter(|c| field.dot_unchecked(&msg, c) != 0)
                .count();
            hist[w] += 1;
        }
        hist
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        const CHUNK: u64 = 4096;
        if total > CHUNK {
            let chunks = total.div_ceil(CHUNK);
            return (0..chunks)
                .into_par_iter()
                .map(|c| count(c * CHUNK, ((c + 1) * CHUNK).min(total)))
                .reduce(
                    || vec![0u64; n + 1],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                        a
                    },
                );
        }
    }
    count(0, total)
}

/// A code built from a subset family: one block per `B_r`, holding
/// `D_r = P_[m] \ ⋃_j P_{B_j^{(r)}}` in canonical order.
#[derive(Clone, Debug)]
pub struct DefiningCode {
    family: SubsetFamily,
    space: ProjSpace,
    code: LinearCode,
    /// `|D_r^c|` per block, by enumeration.
    complement_sizes: Vec<u64>,
    warnings: Vec<String>,
}

pub fn build_code(fam: &SubsetFamily, field: &PrimeField) -> Result<DefiningCode, CodeError> {
    build_code_with_limit(fam, field, DEFAULT_MAX_PM)
}

pub fn build_code_with_limit(
    fam: &SubsetFamily,
    field: &PrimeField,
    max_pm: u64,
) -> Result<DefiningCode, CodeError> {
    let space = ProjSpace::with_limit(field, fam.m(), max_pm)?;
    let mut columns = Vec::new();
    let mut blocks = Vec::with_capacity(fam.s());
    let mut complement_sizes = Vec::with_capacity(fam.s());
    for (r, block) in fam.blocks().iter().enumerate() {
        let start = columns.len();
        for pt in space.points() {
            let support = pt.support();
            if !block.iter().any(|b| support.is_subset(*b)) {
                columns.push(pt.rep().clone());
            }
        }
        let size = columns.len() - start;
        if size == 0 {
            return Err(CodeError::EmptyDefiningSet { block: r + 1 });
        }
        complement_sizes.push((space.len() - size) as u64);
        // The enumerated complement must agree with inclusion-exclusion.
        debug_assert_eq!(
            complement_sizes[r],
            pie_complement_size(block, field.p()).unwrap_or(u64::MAX)
        );
        blocks.push(start..columns.len());
    }
    let mut code = LinearCode::with_blocks(field, fam.m(), columns, blocks)?;
    code.set_scale_limit(max_pm);

    let hyp = fam.construction_hypotheses(field.p());
    let mut warnings: Vec<String> = fam.log().to_vec();
    if !hyp.property_is {
        warnings.push("family does not satisfy Property I_s for the given partition".into());
    }
    for (r, ok) in hyp.block_bounds.iter().enumerate() {
        if !ok {
            warnings.push(format!(
                "block {}: p^(m-1) <= sum of p^(|B|-1); closed-form parameters may not apply",
                r + 1
            ));
        }
    }
    Ok(DefiningCode {
        family: fam.clone(),
        space,
        code,
        complement_sizes,
        warnings,
    })
}

impl DefiningCode {
    pub fn family(&self) -> &SubsetFamily {
        &self.family
    }

    pub fn space(&self) -> &ProjSpace {
        &self.space
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn field(&self) -> &PrimeField {
        self.code.field()
    }

    pub fn complement_sizes(&self) -> &[u64] {
        &self.complement_sizes
    }

    /// Construction caveats: dropped subsets and failed hypotheses.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn parameters(&self) -> Result<CodeParameters, CodeError> {
        self.code.parameters()
    }

    pub fn weight_distribution(&self) -> Result<&WeightDistribution, CodeError> {
        self.code.weight_distribution()
    }

    /// `wt(c_x)` from the block complements alone:
    /// `Σ_r ((|P| − |D_r^c|)(p − 1) + 1 + S_r(x)) / p` where `S_r` is the
    /// character sum over the complement of block `r`. Never touches `D_r`.
    pub fn weight_via_complements(&self, x: &FpVector) -> Result<usize, CodeError> {
        if x.len() != self.space.m() {
            return Err(CodeError::DimensionMismatch {
                expected: self.space.m(),
                got: x.len(),
            });
        }
        if x.is_zero() {
            return Ok(0);
        }
        let p = self.field().p() as i64;
        let full = self.space.len() as i64;
        let mut total = 0i64;
        for block in self.family.blocks() {
            let union = complement_union(&self.space, block);
            let sum = char_sum_over(&self.space, &union, x);
            let numer = (full - union.len() as i64) * (p - 1) + 1 + sum;
            debug_assert_eq!(numer % p, 0);
            total += numer / p;
        }
        Ok(total as usize)
    }
}

fn complement_union<'a>(space: &'a ProjSpace, block: &[IndexSet]) -> Vec<&'a ProjPoint> {
    space
        .points()
        .iter()
        .filter(|pt| {
            let s = pt.support();
            block.iter().any(|b| s.is_subset(*b))
        })
        .collect()
}

fn char_sum_over(space: &ProjSpace, union: &[&ProjPoint], x: &FpVector) -> i64 {
    let field = space.field();
    let zeros = union
        .iter()
        .filter(|d| field.dot_unchecked(x.coords(), d.coords()) == 0)
        .count() as i64;
    field.p() as i64 * zeros - union.len() as i64
}

/// `Σ_{y∈𝔽_p^*} χ_x(y·⋃_i P_{A_i})` as the integer `p·N₀ − |⋃ P_{A_i}|`,
/// with `N₀` the number of union points orthogonal to `x`.
pub fn char_sum(space: &ProjSpace, block: &[IndexSet], x: &FpVector) -> Result<i64, CodeError> {
    if x.len() != space.m() {
        return Err(CodeError::DimensionMismatch {
            expected: space.m(),
            got: x.len(),
        });
    }
    if x.is_zero() {
        return Err(CodeError::ZeroVector);
    }
    for &a in block {
        if !a.is_subset(IndexSet::full(space.m())) {
            return Err(GeometryError::IndexOutOfRange { set: a, m: space.m() }.into());
        }
    }
    let union = complement_union(space, block);
    Ok(char_sum_over(space, &union, x))
}

fn restriction_is_zero(x: &FpVector, a: IndexSet) -> bool {
    a.iter_zero_based().all(|i| x.coords()[i] == 0)
}

/// Five-case closed form of the character sum over `P_{A1} ∪ P_{A2}` for
/// two subsets neither of which contains the other, selected by which of
/// `x_{A1}`, `x_{A2}`, `x_{A1∩A2}` vanish.
pub fn pair_char_sum_closed_form(
    field: &PrimeField,
    a1: IndexSet,
    a2: IndexSet,
    x: &FpVector,
) -> Result<i64, CodeError> {
    if a1.is_subset(a2) || a2.is_subset(a1) {
        return Err(CodeError::ContainmentViolated { a: a1, b: a2 });
    }
    if x.is_zero() {
        return Err(CodeError::ZeroVector);
    }
    let needed = a1.union(a2).max_one_based();
    if x.len() < needed {
        return Err(CodeError::DimensionMismatch {
            expected: needed,
            got: x.len(),
        });
    }
    let p = field.p() as i64;
    let pw = |s: IndexSet| p.pow(s.len() as u32);
    let inter = a1.intersection(a2);
    let z1 = restriction_is_zero(x, a1);
    let z2 = restriction_is_zero(x, a2);
    let zi = restriction_is_zero(x, inter);
    Ok(match (z1, z2) {
        (true, true) => pw(a1) + pw(a2) - pw(inter) - 1,
        (true, false) => pw(a1) - pw(inter) - 1,
        (false, true) => pw(a2) - pw(inter) - 1,
        (false, false) if zi => -pw(inter) - 1,
        (false, false) => -1,
    })
}

/// One row of the closed-form weight table for two blocks `{A1, A2}`,
/// `{A3, A4}` with `A3 ⊆ A1`, `A4 ⊆ A2`, `A1 ∩ A2 = ∅`. The weight is kept
/// multiplied by `p` because rows with zero multiplicity may have a
/// non-integral weight when a subset is empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightTableRow {
    pub weight_times_p: i128,
    pub multiplicity: i128,
}

/// Closed-form weight table for the nested-pairs shape, from the four subset
/// sizes `[|A1|, |A2|, |A3|, |A4|]`. The zero codeword comes first.
pub fn nested_pairs_weight_table(
    p: u32,
    m: usize,
    sizes: [usize; 4],
) -> Result<Vec<WeightTableRow>, CodeError> {
    let [a1, a2, a3, a4] = sizes.map(|s| s as i64);
    let m = m as i64;
    if a3 > a1 || a4 > a2 || a1 + a2 > m {
        return Err(CodeError::ClosedForm(format!(
            "sizes {sizes:?} do not fit the nested-pairs shape in dimension {m}"
        )));
    }
    let p = p as i128;
    let pw = |e: i64| -> i128 { p.pow(e as u32) };
    let top = 2 * pw(m);
    let row = |weight_times_p: i128, multiplicity: i128| WeightTableRow {
        weight_times_p,
        multiplicity,
    };
    let base = pw(m - a1 - a2);
    Ok(vec![
        row(0, 1),
        row(top, pw(m - a1 - a2) - 1),
        row(top - pw(a2), pw(m - a1 - a4) - pw(m - a1 - a2)),
        row(top - pw(a2) - pw(a4), pw(m - a1) - pw(m - a1 - a4)),
        row(top - pw(a1), pw(m - a2 - a3) - pw(m - a1 - a2)),
        row(top - pw(a1) - pw(a3), pw(m - a2) - pw(m - a2 - a3)),
        row(
            top - pw(a1) - pw(a2),
            base * (pw(a1 - a3) - 1) * (pw(a2 - a4) - 1),
        ),
        row(
            top - pw(a1) - pw(a2) - pw(a4),
            base * (pw(a1 - a3) - 1) * (pw(a2) - pw(a2 - a4)),
        ),
        row(
            top - pw(a1) - pw(a2) - pw(a3),
            base * (pw(a2 - a4) - 1) * (pw(a1) - pw(a1 - a3)),
        ),
        row(
            top - pw(a1) - pw(a2) - pw(a3) - pw(a4),
            base * (pw(a1) - pw(a1 - a3)) * (pw(a2) - pw(a2 - a4)),
        ),
    ])
}

/// Collapses table rows into a distribution, merging rows with equal weight
/// and dropping zero-multiplicity rows.
pub fn table_to_distribution(
    p: u32,
    rows: &[WeightTableRow],
) -> Result<WeightDistribution, CodeError> {
    let mut counts = Vec::new();
    for r in rows {
        if r.multiplicity < 0 {
            return Err(CodeError::ClosedForm(format!("negative multiplicity {r:?}")));
        }
        if r.multiplicity == 0 {
            continue;
        }
        if r.weight_times_p % p as i128 != 0 || r.weight_times_p < 0 {
            return Err(CodeError::ClosedForm(format!(
                "row {r:?} has a non-integral weight"
            )));
        }
        counts.push((
            (r.weight_times_p / p as i128) as usize,
            r.multiplicity as u64,
        ));
    }
    Ok(WeightDistribution::from_counts(counts))
}

/// Closed-form length for two blocks `{A1, A2}`, `{A3, A4}` with
/// `A3 ⊆ A1`, `A4 ⊆ A2` and intersecting `A1, A2`:
/// `(2p^m − Σ p^{|A_i|} + p^{|A1∩A2|} + p^{|A3∩A4|}) / (p − 1)`.
pub fn intersecting_pairs_length(p: u32, m: usize, subsets: [IndexSet; 4]) -> i128 {
    let p = p as i128;
    let pw = |s: IndexSet| p.pow(s.len() as u32);
    let [a1, a2, a3, a4] = subsets;
    (2 * p.pow(m as u32) - subsets.iter().map(|&s| pw(s)).sum::<i128>()
        + pw(a1.intersection(a2))
        + pw(a3.intersection(a4)))
        / (p - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ix: &[usize]) -> IndexSet {
        IndexSet::from_one_based(ix.iter().copied()).unwrap()
    }

    fn field(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn example_35() -> SubsetFamily {
        SubsetFamily::new(3, vec![vec![set(&[1, 2]), set(&[3])], vec![set(&[1]), set(&[])]])
            .unwrap()
    }

    #[test]
    fn simplex_parameters() {
        for (p, m) in [(3u64, 2usize), (3, 3), (5, 2)] {
            let fld = field(p);
            let code = build_code(&SubsetFamily::simplex(m).unwrap(), &fld).unwrap();
            let params = code.parameters().unwrap();
            let pu = p as usize;
            assert_eq!(params.n, (pu.pow(m as u32) - 1) / (pu - 1));
            assert_eq!(params.k, m);
            assert_eq!(params.d, Some(pu.pow(m as u32 - 1)));
        }
        let code = build_code(&SubsetFamily::simplex(3).unwrap(), &field(3)).unwrap();
        assert_eq!(code.weight_distribution().unwrap().enumerator(), "1 + 26z^9");
        let code2 = build_code(&SubsetFamily::simplex(2).unwrap(), &field(3)).unwrap();
        for x in field(3).all_vectors(2).filter(|x| !x.is_zero()) {
            assert_eq!(code2.code().weight_of(&x).unwrap(), 3);
        }
    }

    #[test]
    fn example_35_distribution() {
        let code = build_code(&example_35(), &field(3)).unwrap();
        let params = code.parameters().unwrap();
        assert_eq!((params.n, params.k, params.d), (20, 3, Some(13)));
        assert_eq!(
            code.weight_distribution().unwrap().enumerator(),
            "1 + 12z^13 + 10z^14 + 2z^15 + 2z^17"
        );
        assert_eq!(code.complement_sizes(), &[5, 1]);
        assert!(code.warnings().iter().any(|w| w.contains("dropped empty")));
    }

    #[test]
    fn weight_of_checks_length() {
        let code = build_code(&example_35(), &field(3)).unwrap();
        assert_eq!(code.code().weight_of(&FpVector::zero(3)), Ok(0));
        assert!(matches!(
            code.code().weight_of(&FpVector::zero(2)),
            Err(CodeError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn empty_defining_set_is_rejected() {
        let fam = SubsetFamily::new(2, vec![vec![set(&[1, 2])]]).unwrap();
        assert_eq!(
            build_code(&fam, &field(3)).unwrap_err(),
            CodeError::EmptyDefiningSet { block: 1 }
        );
    }

    #[test]
    fn scale_guard() {
        let fam = SubsetFamily::simplex(3).unwrap();
        assert!(matches!(
            build_code_with_limit(&fam, &field(3), 10),
            Err(CodeError::Geometry(GeometryError::ScaleLimitExceeded { .. }))
        ));
    }

    #[test]
    fn rank_deficient_distribution_counts_codewords() {
        let f3 = field(3);
        let v = |c: &[u32]| f3.vector(c).unwrap();
        let code = LinearCode::from_columns(&f3, 3, vec![v(&[1, 1, 0]), v(&[2, 2, 0])]).unwrap();
        assert_eq!(code.dimension(), 1);
        let wd = code.weight_distribution().unwrap();
        assert_eq!(wd.total(), 3);
        assert_eq!(wd.enumerator(), "1 + 2z^2");
    }

    #[test]
    fn puncture_examples() {
        let f3 = field(3);
        let simplex = build_code(&SubsetFamily::simplex(2).unwrap(), &f3).unwrap();
        let one = simplex.code().puncture(&[2]).unwrap();
        let params = one.parameters().unwrap();
        assert_eq!((params.n, params.k, params.d), (1, 1, Some(1)));
        let line = simplex.code().puncture(&[0, 1, 2, 3]).unwrap();
        let params = line.parameters().unwrap();
        assert_eq!((params.n, params.k, params.d), (4, 2, Some(3)));
        assert_eq!(
            simplex.code().puncture(&[]).unwrap_err(),
            CodeError::EmptySelection
        );
        assert!(matches!(
            simplex.code().puncture(&[7]),
            Err(CodeError::PositionOutOfRange { index: 7, n: 4 })
        ));
    }

    #[test]
    fn char_sum_examples() {
        let f3 = field(3);
        let sp = ProjSpace::new(&f3, 2).unwrap();
        let x = f3.vector(&[1, 0]).unwrap();
        assert_eq!(char_sum(&sp, &[set(&[1, 2])], &x), Ok(-1));
        assert_eq!(
            char_sum(&sp, &[set(&[1, 2])], &FpVector::zero(2)),
            Err(CodeError::ZeroVector)
        );
        // x vanishing on A gives p^|A| - 1.
        let sp3 = ProjSpace::new(&f3, 3).unwrap();
        let x = f3.vector(&[0, 0, 1]).unwrap();
        assert_eq!(char_sum(&sp3, &[set(&[1, 2])], &x), Ok(8));
    }

    #[test]
    fn char_sum_minimum_over_example_35_blocks() {
        // Exhaustive scan; the per-block minima (-2 for the disjoint pair,
        // -1 for the single subset) are attained by the same x.
        let f3 = field(3);
        let sp = ProjSpace::new(&f3, 3).unwrap();
        let fam = example_35();
        let min = f3
            .all_vectors(3)
            .filter(|x| !x.is_zero())
            .map(|x| {
                fam.blocks()
                    .iter()
                    .map(|b| char_sum(&sp, b, &x).unwrap())
                    .sum::<i64>()
            })
            .min()
            .unwrap();
        assert_eq!(min, -3);
    }

    #[test]
    fn pair_closed_form_cases() {
        let f3 = field(3);
        let a1 = set(&[1, 2]);
        let a2 = set(&[2, 3]);
        let x = f3.vector(&[0, 0, 0]).unwrap();
        assert_eq!(
            pair_char_sum_closed_form(&f3, a1, a2, &x),
            Err(CodeError::ZeroVector)
        );
        assert!(matches!(
            pair_char_sum_closed_form(&f3, a1, set(&[1, 2, 3]), &f3.vector(&[1, 0, 0]).unwrap()),
            Err(CodeError::ContainmentViolated { .. })
        ));
        // Both restrictions zero cannot happen in [3] for these sets without
        // x = 0, so use m = 4.
        let x = f3.vector(&[0, 0, 0, 1]).unwrap();
        assert_eq!(pair_char_sum_closed_form(&f3, a1, a2, &x), Ok(9 + 9 - 3 - 1));
        let x = f3.vector(&[1, 1, 1]).unwrap();
        assert_eq!(pair_char_sum_closed_form(&f3, a1, a2, &x), Ok(-1));
    }

    #[test]
    fn pair_closed_form_matches_counting_p3_m3() {
        let f3 = field(3);
        let sp = ProjSpace::new(&f3, 3).unwrap();
        let (a1, a2) = (set(&[1, 2]), set(&[2, 3]));
        for x in f3.all_vectors(3).filter(|x| !x.is_zero()) {
            assert_eq!(
                pair_char_sum_closed_form(&f3, a1, a2, &x).unwrap(),
                char_sum(&sp, &[a1, a2], &x).unwrap()
            );
        }
    }

    #[test]
    fn complement_route_matches_direct_weights() {
        let f3 = field(3);
        let code = build_code(&example_35(), &f3).unwrap();
        for x in f3.all_vectors(3) {
            assert_eq!(
                code.weight_via_complements(&x).unwrap(),
                code.code().weight_of(&x).unwrap()
            );
        }
    }

    #[test]
    fn nested_pairs_table_example_35() {
        let rows = nested_pairs_weight_table(3, 3, [2, 1, 1, 0]).unwrap();
        let wd = table_to_distribution(3, &rows).unwrap();
        assert_eq!(wd.enumerator(), "1 + 12z^13 + 10z^14 + 2z^15 + 2z^17");
    }

    #[test]
    fn intersecting_pairs_length_example_37() {
        let subsets = [set(&[1, 2, 3]), set(&[3, 4]), set(&[1, 2]), set(&[3, 4])];
        assert_eq!(intersecting_pairs_length(3, 4, subsets), 56);
    }
}
