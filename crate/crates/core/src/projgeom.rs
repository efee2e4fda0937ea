//! Points of the projective space over 𝔽_p, coordinate subspaces `P_A`, the
//! all-nonzero stratum `P̃`, and projective lines.
//!
//! A point is represented by its unique scalar multiple whose first nonzero
//! coordinate is 1. Points are ordered canonically: first by the position of
//! the leading 1 (ascending), then lexicographically by the coordinates that
//! follow it. [`ProjSpace::index_of`] computes that rank arithmetically.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{FpVector, PrimeField};
use crate::subset::{IndexSet, MAX_DIMENSION};

/// Default ceiling on `p^m` for anything that enumerates 𝔽_p^m or `P_[m]`.
pub const DEFAULT_MAX_PM: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("the zero vector has no projective point")]
    ZeroVector,
    #[error("invalid ambient dimension {0}")]
    InvalidDimension(usize),
    #[error("index set {set} is not contained in [{m}]")]
    IndexOutOfRange { set: IndexSet, m: usize },
    #[error("a line needs two distinct points, got {0} twice")]
    DegenerateLine(ProjPoint),
    #[error("point {0} is not in the projective space")]
    PointNotInSpace(ProjPoint),
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("p^m = {p}^{m} exceeds the scale limit {limit}")]
    ScaleLimitExceeded { p: u32, m: usize, limit: u64 },
}

/// A projective point in normalized form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjPoint(FpVector);

impl ProjPoint {
    pub fn rep(&self) -> &FpVector {
        &self.0
    }

    pub fn coords(&self) -> &[u32] {
        self.0.coords()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Zero-based position of the leading 1.
    pub fn leading(&self) -> usize {
        self.coords()
            .iter()
            .position(|&c| c != 0)
            .expect("projective points are nonzero")
    }

    /// Coordinates (zero-based) holding a nonzero entry.
    pub fn support(&self) -> IndexSet {
        IndexSet::from_zero_based(
            self.coords()
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, _)| i),
        )
    }

    /// Member of `P̃_[m]`: every coordinate nonzero (the first is then 1).
    pub fn is_restricted(&self) -> bool {
        self.coords().iter().all(|&c| c != 0)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The normalization map `[f]`.
pub fn normalize(field: &PrimeField, f: &FpVector) -> Result<ProjPoint, GeometryError> {
    let lead = f
        .coords()
        .iter()
        .find(|&&c| c != 0)
        .ok_or(GeometryError::ZeroVector)?;
    let inv = field.inv(*lead).expect("leading coordinate is nonzero");
    Ok(ProjPoint(field.scale(inv, f)))
}

/// `𝔽_p` listed as `{0, −1, α_1, …, α_{p−2}}`; this returns the α list,
/// which is `1, …, p−2` in natural order.
pub fn alphas(field: &PrimeField) -> Vec<u32> {
    (1..field.p().saturating_sub(1)).collect()
}

/// `(p^e − 1)/(p − 1)`, the number of points in a projective space of
/// vector dimension `e`.
pub fn projective_count(p: u32, e: usize) -> u64 {
    (0..e).map(|i| (p as u64).pow(i as u32)).sum()
}

pub fn check_scale(p: u32, m: usize, limit: u64) -> Result<(), GeometryError> {
    let pm = (p as u64).checked_pow(m as u32);
    match pm {
        Some(v) if v <= limit => Ok(()),
        _ => Err(GeometryError::ScaleLimitExceeded { p, m, limit }),
    }
}

/// `P_[m]` with its points in canonical order.
#[derive(Clone, Debug)]
pub struct ProjSpace {
    field: PrimeField,
    m: usize,
    points: Vec<ProjPoint>,
    /// `offsets[i]` is the canonical index of the first point led at position i.
    offsets: Vec<usize>,
}

impl ProjSpace {
    pub fn new(field: &PrimeField, m: usize) -> Result<Self, GeometryError> {
        Self::with_limit(field, m, DEFAULT_MAX_PM)
    }

    pub fn with_limit(field: &PrimeField, m: usize, max_pm: u64) -> Result<Self, GeometryError> {
        if !(1..=MAX_DIMENSION).contains(&m) {
            return Err(GeometryError::InvalidDimension(m));
        }
        check_scale(field.p(), m, max_pm)?;
        let p = field.p();
        let mut points = Vec::with_capacity(projective_count(p, m) as usize);
        let mut offsets = Vec::with_capacity(m);
        for lead in 0..m {
            offsets.push(points.len());
            let tail = m - lead - 1;
            for idx in 0..(p as u64).pow(tail as u32) {
                let mut coords = vec![0u32; m];
                coords[lead] = 1;
                coords[lead + 1..].copy_from_slice(&field.digits(idx, tail));
                points.push(ProjPoint(FpVector(coords)));
            }
        }
        Ok(Self {
            field: field.clone(),
            m,
            points,
            offsets,
        })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, index: usize) -> &ProjPoint {
        &self.points[index]
    }

    /// Canonical index of a normalized point, or `None` if it does not belong
    /// here (wrong length or not normalized).
    pub fn index_of(&self, point: &ProjPoint) -> Option<usize> {
        if point.dim() != self.m {
            return None;
        }
        self.index_of_coords(point.coords())
    }

    pub(crate) fn index_of_coords(&self, coords: &[u32]) -> Option<usize> {
        let lead = coords.iter().position(|&c| c != 0)?;
        if coords[lead] != 1 {
            return None;
        }
        let p = self.field.p() as usize;
        let tail = coords[lead + 1..]
            .iter()
            .fold(0usize, |acc, &c| acc * p + c as usize);
        Some(self.offsets[lead] + tail)
    }

    pub fn contains(&self, point: &ProjPoint) -> bool {
        self.index_of(point).is_some()
    }

    /// `P_A`: the points whose support lies inside `a`. `P_∅` is empty.
    pub fn subspace(&self, a: IndexSet) -> Result<Vec<ProjPoint>, GeometryError> {
        if !a.is_subset(IndexSet::full(self.m)) {
            return Err(GeometryError::IndexOutOfRange { set: a, m: self.m });
        }
        Ok(self
            .points
            .iter()
            .filter(|pt| pt.support().is_subset(a))
            .cloned()
            .collect())
    }

    /// `P̃_[m]`: points with every coordinate nonzero.
    pub fn restricted_points(&self) -> Vec<ProjPoint> {
        self.points
            .iter()
            .filter(|pt| pt.is_restricted())
            .cloned()
            .collect()
    }

    /// Every projective line through `g`. Distinct lines meet only in `g`.
    pub fn lines_through(&self, g: &ProjPoint) -> Result<Vec<Vec<ProjPoint>>, GeometryError> {
        let g_idx = self
            .index_of(g)
            .ok_or_else(|| GeometryError::PointNotInSpace(g.clone()))?;
        let mut covered = vec![false; self.points.len()];
        covered[g_idx] = true;
        let mut lines = Vec::new();
        for (h_idx, h) in self.points.iter().enumerate() {
            if covered[h_idx] {
                continue;
            }
            let line = line_through(&self.field, g, h)?;
            for pt in &line {
                let i = self.index_of(pt).expect("line points are normalized");
                covered[i] = true;
            }
            lines.push(line);
        }
        Ok(lines)
    }
}

/// The line `[g,h] = {g, h, [h−g], [h+α_1 g], …, [h+α_{p−2} g]}`, in that
/// order. It has `p + 1` points.
pub fn line_through(
    field: &PrimeField,
    g: &ProjPoint,
    h: &ProjPoint,
) -> Result<Vec<ProjPoint>, GeometryError> {
    if g.dim() != h.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: g.dim(),
            got: h.dim(),
        });
    }
    if g == h {
        return Err(GeometryError::DegenerateLine(g.clone()));
    }
    let mut line = Vec::with_capacity(field.p() as usize + 1);
    line.push(g.clone());
    line.push(h.clone());
    let minus_one = field.neg(1);
    for coeff in std::iter::once(minus_one).chain(alphas(field)) {
        let v = field
            .add_scaled(h.rep(), coeff, g.rep())
            .expect("same dimension");
        line.push(normalize(field, &v)?);
    }
    Ok(line)
}
