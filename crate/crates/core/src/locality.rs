//! (2,δ)-locality and (2,δ)_t-availability certificates built from
//! projective lines, and a brute-force (r,δ) oracle for tiny codes.
//!
//! Any `t ≥ 2` pairwise non-proportional points on one projective line
//! puncture the code to a `[t, 2, t−1]` MDS code, so a coordinate with point
//! `g` has (2,δ)-locality as soon as some line through `g` carries `δ` other
//! columns. Every emitted repair set is re-verified by puncturing.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CodeError, DefiningCode, LinearCode};
use crate::gf::{FpVector, PrimeField};
use crate::projgeom::{alphas, normalize, projective_count, GeometryError, ProjPoint};
use crate::subset::IndexSet;

/// Default ceiling on code length for [`brute_force_rdelta`].
pub const DEFAULT_MAX_BRUTE_N: usize = 24;
/// Largest repair-set size the brute-force oracle will search.
pub const MAX_BRUTE_SET: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalityError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("delta = {delta} is outside 2..={p}")]
    InvalidDelta { delta: usize, p: u32 },
    #[error("t must be at least 1")]
    InvalidAvailability,
    #[error("column {column} does not belong to block {block}")]
    PointNotInBlock { column: usize, block: usize },
    #[error("coordinate {coordinate} has no line repair set with delta = {delta} (best {best_delta})")]
    LocalityNotCertifiable {
        coordinate: usize,
        delta: usize,
        best_delta: usize,
    },
    #[error("coordinate {coordinate} has only {achieved_t} disjoint repair sets")]
    AvailabilityNotCertifiable { coordinate: usize, achieved_t: usize },
    #[error("repair set for coordinate {coordinate} failed verification: {reason}")]
    VerificationFailed { coordinate: usize, reason: String },
    #[error("complement-count guarantee failed at coordinate {coordinate}")]
    Inconsistent { coordinate: usize },
    #[error("brute force limited to n <= {max_n} and r + delta - 1 <= {max_set}; got n = {n}, set size {set}")]
    ScaleLimitExceeded {
        n: usize,
        max_n: usize,
        set: usize,
        max_set: usize,
    },
    #[error("this construction needs p >= 5, got {p}")]
    UnsupportedPrime { p: u32 },
    #[error("index j = {j} is outside 1..={max}")]
    InvalidIndex { j: usize, max: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalityMethod {
    /// The block misses fewer points than there are lines through a point,
    /// so some line through every point lies entirely in the block.
    ComplementCount,
    /// A partner point from the explicit recipes spans a good line.
    Constructive,
    /// Exhaustive scan of lines through the point inside its own block.
    LineScan,
    /// A line inside a different block (the coordinate's own block has none).
    OtherBlock,
    /// Distinct points of one line collected from several blocks; used only
    /// when no single block carries enough points.
    CrossBlock,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairSet {
    /// Block the repair columns come from, 0-based. Cross-block sets record
    /// the coordinate's own block.
    pub block: usize,
    /// Repair columns, excluding the coordinate itself.
    pub columns: Vec<usize>,
    pub method: LocalityMethod,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateCertificate {
    pub coordinate: usize,
    pub block: usize,
    /// Largest δ reachable with a line inside the coordinate's own block.
    pub best_delta: usize,
    pub repair_sets: Vec<RepairSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalityCertificate {
    pub r: usize,
    pub delta: usize,
    pub t: usize,
    pub coordinates: Vec<CoordinateCertificate>,
    /// Minimum of the per-coordinate best δ.
    pub uniform_best_delta: usize,
    /// How many coordinates each method certified (first repair set).
    pub method_counts: BTreeMap<String, usize>,
}

/// Best δ for one coordinate together with a line witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineScan {
    pub column: usize,
    pub block: usize,
    pub best_delta: usize,
    /// The coordinate followed by the other block columns on the best line.
    pub witness: Vec<usize>,
    /// Number of distinct lines through the point reaching `best_delta`.
    pub witnessing_lines: usize,
}

/// Normalized points of the columns and per-block lookup tables.
struct Geometry<'a> {
    code: &'a LinearCode,
    points: Vec<Option<ProjPoint>>,
    lookup: Vec<HashMap<Vec<u32>, usize>>,
}

impl<'a> Geometry<'a> {
    fn new(code: &'a LinearCode) -> Self {
        let field = code.field();
        let points: Vec<Option<ProjPoint>> = code
            .columns()
            .iter()
            .map(|c| normalize(field, c).ok())
            .collect();
        let lookup = code
            .blocks()
            .iter()
            .map(|range| {
                let mut map = HashMap::new();
                for j in range.clone() {
                    if let Some(pt) = &points[j] {
                        map.entry(pt.coords().to_vec()).or_insert(j);
                    }
                }
                map
            })
            .collect();
        Self {
            code,
            points,
            lookup,
        }
    }

    fn field(&self) -> &PrimeField {
        self.code.field()
    }

    /// Lines through `g` inside block `b`: line key → sorted columns on the
    /// line other than `g`. The key is the unique line point whose
    /// coordinate at `g`'s leading position vanishes.
    fn lines_in_block(&self, g: &ProjPoint, b: usize) -> BTreeMap<Vec<u32>, Vec<usize>> {
        let field = self.field();
        let lead = g.leading();
        let mut lines: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
        for (coords, &col) in &self.lookup[b] {
            if coords.as_slice() == g.coords() {
                continue;
            }
            let h_lead = coords[lead];
            let diff: Vec<u32> = coords
                .iter()
                .zip(g.coords())
                .map(|(&h, &gi)| field.sub(h, field.mul(h_lead, gi)))
                .collect();
            let key = normalize(field, &FpVector(diff))
                .expect("distinct normalized points are not proportional");
            lines.entry(key.coords().to_vec()).or_default().push(col);
        }
        for cols in lines.values_mut() {
            cols.sort_unstable();
        }
        lines
    }

    /// Like [`Self::lines_in_block`] over the union of all blocks, keeping
    /// one column (the smallest) per distinct point.
    fn lines_all_blocks(&self, g: &ProjPoint) -> BTreeMap<Vec<u32>, Vec<usize>> {
        let mut by_point: BTreeMap<&Vec<u32>, usize> = BTreeMap::new();
        for map in &self.lookup {
            for (coords, &col) in map {
                let e = by_point.entry(coords).or_insert(col);
                *e = (*e).min(col);
            }
        }
        let mut lines: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
        for (coords, col) in by_point {
            if coords.as_slice() == g.coords() {
                continue;
            }
            if let Some(k) = self.line_key(g, coords) {
                lines.entry(k).or_default().push(col);
            }
        }
        for cols in lines.values_mut() {
            cols.sort_unstable();
        }
        lines
    }

    fn line_key(&self, g: &ProjPoint, h: &[u32]) -> Option<Vec<u32>> {
        let field = self.field();
        let lead = g.leading();
        let diff: Vec<u32> = h
            .iter()
            .zip(g.coords())
            .map(|(&hi, &gi)| field.sub(hi, field.mul(h[lead], gi)))
            .collect();
        normalize(field, &FpVector(diff)).ok().map(|p| p.coords().to_vec())
    }
}

fn check_delta(field: &PrimeField, delta: usize) -> Result<(), LocalityError> {
    let p = field.p();
    if delta < 2 || delta > p as usize {
        return Err(LocalityError::InvalidDelta { delta, p });
    }
    Ok(())
}

/// Best δ for `column` using lines through its point inside `block`.
pub fn line_locality_scan(
    code: &LinearCode,
    block: usize,
    column: usize,
) -> Result<LineScan, LocalityError> {
    if block >= code.blocks().len() || !code.blocks()[block].contains(&column) {
        return Err(LocalityError::PointNotInBlock { column, block });
    }
    let geo = Geometry::new(code);
    let Some(g) = geo.points[column].clone() else {
        return Ok(LineScan {
            column,
            block,
            best_delta: 0,
            witness: vec![column],
            witnessing_lines: 0,
        });
    };
    let lines = geo.lines_in_block(&g, block);
    let best = lines.values().map(Vec::len).max().unwrap_or(0);
    let mut witness = vec![column];
    if let Some(cols) = lines.values().find(|c| c.len() == best) {
        witness.extend(cols);
    }
    Ok(LineScan {
        column,
        block,
        best_delta: best,
        witness,
        witnessing_lines: lines.values().filter(|c| c.len() == best && best > 0).count(),
    })
}

/// Family data used by the shortcut and constructive strategies.
struct FamilyContext<'a> {
    dc: &'a DefiningCode,
}

impl FamilyContext<'_> {
    fn counting_applies(&self, block: usize) -> bool {
        let p = self.dc.field().p();
        let m = self.dc.space().m();
        m >= 2 && self.dc.complement_sizes()[block] < projective_count(p, m - 1)
    }

    /// Partner points from the explicit recipes, in preference order.
    fn partners(&self, block: usize, g: &ProjPoint) -> Vec<Vec<u32>> {
        let field = self.dc.field();
        let m = g.dim();
        let mut out = Vec::new();
        if g.is_restricted() {
            let subsets = &self.dc.family().blocks()[block];
            for missing in 0..m {
                let a_star = IndexSet::full(m).difference(IndexSet::from_zero_based([missing]));
                if m < 2 || subsets.contains(&a_star) {
                    continue;
                }
                let h: Vec<u32> = if missing == 0 {
                    let inv = field.inv(g.coords()[1]).expect("restricted point");
                    let mut v: Vec<u32> = g.coords().iter().map(|&x| field.mul(inv, x)).collect();
                    v[0] = 0;
                    v
                } else {
                    let mut v = g.coords().to_vec();
                    v[missing] = 0;
                    v
                };
                out.push(h);
            }
            if field.p() >= 5 {
                if let Ok(h) = restricted_partner(field, g, Some(field.p() as usize - 2)) {
                    out.push(h.coords().to_vec());
                }
            }
        } else if let Ok(h) = restricted_partner(field, g, None) {
            out.push(h.coords().to_vec());
        }
        out
    }
}

fn take_line(cols: &[usize], delta: usize) -> Vec<usize> {
    cols[..delta].to_vec()
}

fn certify_impl(
    code: &LinearCode,
    ctx: Option<&FamilyContext<'_>>,
    delta: usize,
    t: usize,
) -> Result<LocalityCertificate, LocalityError> {
    check_delta(code.field(), delta)?;
    if t == 0 {
        return Err(LocalityError::InvalidAvailability);
    }
    let geo = Geometry::new(code);
    let nblocks = code.blocks().len();
    let mut coordinates = Vec::with_capacity(code.len());
    for i in 0..code.len() {
        let block = code.block_of(i).expect("blocks cover all columns");
        let Some(g) = geo.points[i].clone() else {
            return Err(LocalityError::LocalityNotCertifiable {
                coordinate: i,
                delta,
                best_delta: 0,
            });
        };
        let per_block: Vec<BTreeMap<Vec<u32>, Vec<usize>>> =
            (0..nblocks).map(|b| geo.lines_in_block(&g, b)).collect();
        let own = &per_block[block];
        let best_delta = own.values().map(Vec::len).max().unwrap_or(0);

        // First repair set: the strategy ladder inside the own block.
        let mut first: Option<(Vec<u32>, LocalityMethod)> = None;
        if let Some(ctx) = ctx {
            if ctx.counting_applies(block) {
                let full = own
                    .iter()
                    .find(|(_, c)| c.len() == code.field().p() as usize)
                    .map(|(k, _)| k.clone());
                match full {
                    Some(k) => first = Some((k, LocalityMethod::ComplementCount)),
                    None => return Err(LocalityError::Inconsistent { coordinate: i }),
                }
            } else {
                for h in ctx.partners(block, &g) {
                    if !geo.lookup[block].contains_key(&h) {
                        continue;
                    }
                    if let Some(k) = geo.line_key(&g, &h) {
                        if own.get(&k).is_some_and(|c| c.len() >= delta) {
                            first = Some((k, LocalityMethod::Constructive));
                            break;
                        }
                    }
                }
            }
        }
        if first.is_none() {
            first = own
                .iter()
                .filter(|(_, c)| c.len() >= delta)
                .max_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| b.0.cmp(a.0)))
                .map(|(k, _)| (k.clone(), LocalityMethod::LineScan));
        }

        // Candidates per block: the chosen own-block line leads its queue,
        // then round-robin across blocks so each block contributes one set
        // before any block contributes a second. Lines through g within one
        // block are disjoint away from g; different blocks use different
        // columns.
        let used_own_key = first.as_ref().map(|(k, _)| k.clone());
        let mut queues: Vec<Vec<(Vec<usize>, LocalityMethod)>> = (0..nblocks)
            .map(|b| {
                let method = if b == block {
                    LocalityMethod::LineScan
                } else {
                    LocalityMethod::OtherBlock
                };
                per_block[b]
                    .iter()
                    .filter(|(k, c)| {
                        c.len() >= delta && !(b == block && Some(*k) == used_own_key.as_ref())
                    })
                    .map(|(_, c)| (take_line(c, delta), method))
                    .collect()
            })
            .collect();
        if let Some((k, method)) = first {
            queues[block].insert(0, (take_line(&own[&k], delta), method));
        }
        let order: Vec<usize> = std::iter::once(block)
            .chain((0..nblocks).filter(|&b| b != block))
            .collect();
        let mut sets: Vec<RepairSet> = Vec::new();
        let mut round = 0;
        while sets.len() < t && queues.iter().any(|q| round < q.len()) {
            for &b in &order {
                if sets.len() == t {
                    break;
                }
                if let Some((cols, method)) = queues[b].get(round).cloned() {
                    sets.push(RepairSet {
                        block: b,
                        columns: cols,
                        method,
                    });
                }
            }
            round += 1;
        }
        // Last resort for plain locality: one line, points from any blocks.
        if sets.is_empty() && t == 1 {
            if let Some(cols) = geo
                .lines_all_blocks(&g)
                .values()
                .filter(|c| c.len() >= delta)
                .max_by_key(|c| c.len())
            {
                sets.push(RepairSet {
                    block,
                    columns: take_line(cols, delta),
                    method: LocalityMethod::CrossBlock,
                });
            }
        }
        if sets.len() < t {
            if sets.is_empty() && t == 1 {
                return Err(LocalityError::LocalityNotCertifiable {
                    coordinate: i,
                    delta,
                    best_delta,
                });
            }
            return Err(LocalityError::AvailabilityNotCertifiable {
                coordinate: i,
                achieved_t: sets.len(),
            });
        }
        coordinates.push(CoordinateCertificate {
            coordinate: i,
            block,
            best_delta,
            repair_sets: sets,
        });
    }
    let uniform_best_delta = coordinates.iter().map(|c| c.best_delta).min().unwrap_or(0);
    let mut method_counts = BTreeMap::new();
    for c in &coordinates {
        let key = serde_json::to_value(c.repair_sets[0].method)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        *method_counts.entry(key).or_insert(0) += 1;
    }
    let cert = LocalityCertificate {
        r: 2,
        delta,
        t,
        coordinates,
        uniform_best_delta,
        method_counts,
    };
    verify_certificate(code, &cert)?;
    Ok(cert)
}

/// Certifies (2,δ)-locality of a defining-set code. Strategies, in order:
/// the complement-count guarantee, explicit partner recipes, a scan of lines
/// in the coordinate's block, and finally a line inside another block.
pub fn certify_locality(dc: &DefiningCode, delta: usize) -> Result<LocalityCertificate, LocalityError> {
    certify_impl(dc.code(), Some(&FamilyContext { dc }), delta, 1)
}

/// Line-scan certification for an arbitrary code, e.g. an imported matrix.
pub fn certify_locality_code(code: &LinearCode, delta: usize) -> Result<LocalityCertificate, LocalityError> {
    certify_impl(code, None, delta, 1)
}

/// Certifies (2,δ)_t-availability: `t` pairwise disjoint line repair sets
/// per coordinate, taking one from each block before reusing a block.
pub fn certify_availability(
    dc: &DefiningCode,
    delta: usize,
    t: usize,
) -> Result<LocalityCertificate, LocalityError> {
    certify_impl(dc.code(), Some(&FamilyContext { dc }), delta, t)
}

/// Re-checks a certificate against the code: sizes, disjointness, and
/// punctured minimum distance of every repair set joined with its coordinate.
pub fn verify_certificate(code: &LinearCode, cert: &LocalityCertificate) -> Result<(), LocalityError> {
    if cert.coordinates.len() != code.len() {
        return Err(LocalityError::VerificationFailed {
            coordinate: cert.coordinates.len(),
            reason: format!("covers {} of {} coordinates", cert.coordinates.len(), code.len()),
        });
    }
    let fail = |coordinate: usize, reason: String| LocalityError::VerificationFailed { coordinate, reason };
    for (i, c) in cert.coordinates.iter().enumerate() {
        if c.coordinate != i {
            return Err(fail(i, "coordinates out of order".into()));
        }
        if c.repair_sets.len() < cert.t {
            return Err(fail(i, format!("{} repair sets, need {}", c.repair_sets.len(), cert.t)));
        }
        let mut seen = vec![false; code.len()];
        for set in &c.repair_sets {
            if set.columns.len() + 1 > cert.r + cert.delta - 1 {
                return Err(fail(i, "repair set too large".into()));
            }
            for &j in &set.columns {
                if j >= code.len() || j == i || seen[j] {
                    return Err(fail(i, format!("column {j} repeated or invalid")));
                }
                seen[j] = true;
            }
            let mut cols = vec![i];
            cols.extend(&set.columns);
            let punctured = code.puncture(&cols)?;
            let d = punctured.minimum_distance()?.unwrap_or(0);
            if d < cert.delta {
                return Err(fail(i, format!("punctured distance {d} < {}", cert.delta)));
            }
        }
    }
    Ok(())
}

/// Outcome of the exhaustive (r,δ) search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteForceResult {
    pub holds: bool,
    /// One repair set per coordinate (containing it), up to the first failure.
    pub witnesses: Vec<Vec<usize>>,
    pub failing_coordinate: Option<usize>,
}

fn rank_of(field: &PrimeField, cols: &[&[u32]]) -> usize {
    field.row_echelon(cols.iter().map(|c| c.to_vec()).collect()).len()
}

/// Whether removing any `δ − 1` members of `set` leaves the rank unchanged,
/// i.e. every such group is a combination of the rest.
fn satisfies_definition(field: &PrimeField, set: &[&[u32]], delta: usize) -> bool {
    let full = rank_of(field, set);
    let mut ok = true;
    for_each_combination(set.len(), delta - 1, &mut |removed| {
        let rest: Vec<&[u32]> = set
            .iter()
            .enumerate()
            .filter(|(j, _)| !removed.contains(j))
            .map(|(_, c)| *c)
            .collect();
        if rank_of(field, &rest) != full {
            ok = false;
        }
        ok
    });
    ok
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order until it
/// returns false. Returns false when stopped early.
fn for_each_combination(n: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            if !rec(i + 1, n, k, cur, f) {
                return false;
            }
            cur.pop();
        }
        true
    }
    if k > n {
        return true;
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f)
}

/// Exhaustive (r,δ)-locality check straight from the definition: for each
/// coordinate `i`, search all sets `S ∋ i` with `δ ≤ |S| ≤ r + δ − 1` such
/// that any `δ − 1` members are combinations of the others. Stops at the
/// first coordinate without such a set.
pub fn brute_force_rdelta(
    code: &LinearCode,
    r: usize,
    delta: usize,
    max_n: usize,
) -> Result<BruteForceResult, LocalityError> {
    let set = r + delta - 1;
    if code.len() > max_n || set > MAX_BRUTE_SET {
        return Err(LocalityError::ScaleLimitExceeded {
            n: code.len(),
            max_n,
            set,
            max_set: MAX_BRUTE_SET,
        });
    }
    if r == 0 || delta < 2 {
        return Err(LocalityError::InvalidDelta {
            delta,
            p: code.field().p(),
        });
    }
    let field = code.field();
    let n = code.len();
    let cols: Vec<&[u32]> = code.columns().iter().map(|c| c.coords()).collect();
    let mut witnesses = Vec::with_capacity(n);
    for i in 0..n {
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let mut found: Option<Vec<usize>> = None;
        for size in delta..=set.min(n) {
            for_each_combination(others.len(), size - 1, &mut |pick| {
                let members: Vec<&[u32]> = std::iter::once(cols[i])
                    .chain(pick.iter().map(|&k| cols[others[k]]))
                    .collect();
                if satisfies_definition(field, &members, delta) {
                    let mut w = vec![i];
                    w.extend(pick.iter().map(|&k| others[k]));
                    found = Some(w);
                    return false;
                }
                true
            });
            if found.is_some() {
                break;
            }
        }
        match found {
            Some(w) => witnesses.push(w),
            None => {
                return Ok(BruteForceResult {
                    holds: false,
                    witnesses,
                    failing_coordinate: Some(i),
                })
            }
        }
    }
    Ok(BruteForceResult {
        holds: true,
        witnesses,
        failing_coordinate: None,
    })
}

/// Which partner recipe applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartnerKind {
    /// `g` has all coordinates nonzero; one multiplier index `j` is sacrificed.
    Restricted,
    /// `g` has a zero coordinate; every multiplier works.
    Unrestricted,
}

pub fn partner_kind(g: &ProjPoint) -> PartnerKind {
    if g.is_restricted() {
        PartnerKind::Restricted
    } else {
        PartnerKind::Unrestricted
    }
}

/// A partner `h` with all coordinates nonzero such that `[h + α_i g]` also
/// has all coordinates nonzero for the promised multipliers `α_i = i`:
///
/// * `g` all-nonzero (needs `p ≥ 5` and `j ∈ 1..=p−2`):
///   `h = (1, −α_j g_2, …, −α_j g_m)`, good for every `i ≠ j`;
/// * otherwise, with `g` leading at position `i` and zero set `Z`:
///   `h = (1, …, 1, h_{i+1}, …, h_m)` with `h_r = g_r` off `Z` and `h_r = 1`
///   on `Z`, good for every `i ∈ 1..=p−2`.
///
/// `j` is ignored in the second case.
pub fn restricted_partner(
    field: &PrimeField,
    g: &ProjPoint,
    j: Option<usize>,
) -> Result<ProjPoint, LocalityError> {
    let p = field.p();
    let coords = g.coords();
    let h: Vec<u32> = if g.is_restricted() {
        if p < 5 {
            return Err(LocalityError::UnsupportedPrime { p });
        }
        let max = p as usize - 2;
        let j = j.unwrap_or(max);
        if j == 0 || j > max {
            return Err(LocalityError::InvalidIndex { j, max });
        }
        let alpha = j as u32;
        std::iter::once(1)
            .chain(coords[1..].iter().map(|&x| field.neg(field.mul(alpha, x))))
            .collect()
    } else {
        let lead = g.leading();
        coords
            .iter()
            .enumerate()
            .map(|(r, &x)| if r <= lead || x == 0 { 1 } else { x })
            .collect()
    };
    let h = normalize(field, &FpVector(h))?;
    let excluded = if g.is_restricted() { j.or(Some(p as usize - 2)) } else { None };
    if !partner_is_admissible(field, g, &h, excluded) {
        return Err(LocalityError::VerificationFailed {
            coordinate: 0,
            reason: format!("partner {h} of {g} is not admissible"),
        });
    }
    Ok(h)
}

/// Whether `h` and every `[h + α_i g]`, `i ∈ 1..=p−2` except `excluded`,
/// have all coordinates nonzero.
pub fn partner_is_admissible(
    field: &PrimeField,
    g: &ProjPoint,
    h: &ProjPoint,
    excluded: Option<usize>,
) -> bool {
    if !h.is_restricted() || h == g {
        return false;
    }
    alphas(field)
        .into_iter()
        .filter(|&a| Some(a as usize) != excluded)
        .all(|a| {
            let v = field
                .add_scaled(h.rep(), a, g.rep())
                .expect("same dimension");
            normalize(field, &v).is_ok_and(|pt| pt.is_restricted())
        })
}
