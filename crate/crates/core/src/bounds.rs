//! Griesmer and Plotkin machinery, distance- and alphabet-optimality
//! certificates, and the Singleton-like defect for LRCs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CodeError, DefiningCode};
use crate::family::{family_stats, FamilyError, SubsetFamily};
use crate::subset::IndexSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("t range 1..=ceil(k/r)-1 is empty for k = {k}, r = {r}")]
    DegenerateRange { k: usize, r: usize },
    #[error("Griesmer criteria disagree: combinatorial {combinatorial}, numeric {numeric}")]
    CriterionMismatch { combinatorial: bool, numeric: bool },
    #[error("family does not have the intersecting-pairs shape: {0}")]
    ShapeMismatch(String),
    #[error("the zero code has no minimum distance")]
    ZeroCode,
}

/// `Σ_{i=0}^{k−1} ⌈d / p^i⌉`.
pub fn griesmer_sum(p: u32, k: usize, d: u64) -> u64 {
    let mut total = 0u64;
    let mut pow = 1u64;
    for _ in 0..k {
        total += d.div_ceil(pow);
        // Once p^i exceeds d every later term is 1.
        pow = pow.saturating_mul(p as u64);
    }
    total
}

/// No `[n, k, d']` code with `d' > d` exists, by the Griesmer bound.
pub fn distance_optimal_by_griesmer(p: u32, n: u64, k: usize, d: u64) -> bool {
    griesmer_sum(p, k, d + 1) > n
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GriesmerCertificate {
    pub n: u64,
    pub k: usize,
    pub d: u64,
    pub griesmer_sum: u64,
    pub is_griesmer: bool,
    pub blocks_disjoint: Vec<bool>,
    pub max_multiplicity: usize,
    pub multiplicity_ok: bool,
    /// Disjoint blocks and `M ≤ p − 1`.
    pub combinatorial: bool,
    /// True when the construction hypotheses fail (or `p = 2`), so the two
    /// criteria are reported but not required to agree.
    pub conditional: bool,
}

/// Evaluates the Griesmer property numerically on the enumerated code and
/// combinatorially on the family, and requires agreement whenever the
/// construction hypotheses hold.
pub fn check_griesmer_iff(code: &DefiningCode) -> Result<GriesmerCertificate, BoundsError> {
    let p = code.field().p();
    let fam = code.family();
    let params = code.parameters()?;
    let d = params.d.ok_or(BoundsError::ZeroCode)? as u64;
    let n = params.n as u64;
    let sum = griesmer_sum(p, params.k, d);
    let blocks_disjoint = fam.blocks_disjoint();
    let stats = family_stats(fam, p);
    let multiplicity_ok = stats.max_multiplicity < p as usize;
    let combinatorial = blocks_disjoint.iter().all(|&b| b) && multiplicity_ok;
    let is_griesmer = n == sum;
    let conditional = p == 2 || !fam.construction_hypotheses(p).holds;
    if !conditional && combinatorial != is_griesmer {
        return Err(BoundsError::CriterionMismatch {
            combinatorial,
            numeric: is_griesmer,
        });
    }
    Ok(GriesmerCertificate {
        n,
        k: params.k,
        d,
        griesmer_sum: sum,
        is_griesmer,
        blocks_disjoint,
        max_multiplicity: stats.max_multiplicity,
        multiplicity_ok,
        combinatorial,
        conditional,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceOptimalityCertificate {
    /// `(p − 1) Σ_r |D_r^c|`
    pub lhs: i128,
    /// `Σ p^{|A_i|} − C − (p − 1)(v_p + 1)`
    pub rhs: i128,
    /// `lhs > rhs`: the family-level sufficient condition.
    pub sufficient: bool,
    pub digit_sum: u64,
    pub valuation: usize,
}

/// The family-level sufficient condition for distance optimality,
/// `Σ|D_r^c| > (Σ p^{|A_i|} − C)/(p − 1) − v_p − 1`, evaluated after
/// multiplying through by `p − 1` so that everything stays integral.
pub fn distance_optimal_sufficient(
    fam: &SubsetFamily,
    p: u32,
) -> Result<DistanceOptimalityCertificate, BoundsError> {
    let stats = family_stats(fam, p);
    let predicted = fam.predicted_parameters(p)?;
    let q = p as i128 - 1;
    let lhs = q * predicted.complement_total;
    let rhs = fam.sum_powers(p, 0)? - stats.digit_sum as i128 - q * (stats.valuation as i128 + 1);
    Ok(DistanceOptimalityCertificate {
        lhs,
        rhs,
        sufficient: lhs > rhs,
        digit_sum: stats.digit_sum,
        valuation: stats.valuation,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KoptMethod {
    Griesmer,
    Plotkin,
    /// Both bounds give the same value.
    Both,
    /// Length below `d`: no nonzero code exists.
    Trivial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KoptBound {
    pub value: usize,
    pub method: KoptMethod,
    pub griesmer: usize,
    pub plotkin: Option<usize>,
}

/// Upper bound on the largest dimension of a p-ary code of length `n` and
/// minimum distance `d`: the smaller of the Griesmer and Plotkin bounds.
pub fn kopt_upper(p: u32, n: u64, d: u64) -> Result<KoptBound, BoundsError> {
    if d == 0 || d > n {
        return Err(BoundsError::InvalidParams(format!(
            "need 1 <= d <= n, got n = {n}, d = {d}"
        )));
    }
    let mut griesmer = 1usize;
    while griesmer_sum(p, griesmer + 1, d) <= n {
        griesmer += 1;
    }
    // Plotkin: p^k ≤ pd / (pd − (p−1)n) when the denominator is positive.
    let (pd, qn) = (p as u128 * d as u128, (p as u128 - 1) * n as u128);
    let plotkin = (pd > qn).then(|| {
        let denom = pd - qn;
        let mut k = 0usize;
        let mut pow = p as u128;
        while pow * denom <= pd {
            k += 1;
            pow *= p as u128;
        }
        k
    });
    let (value, method) = match plotkin {
        Some(pl) if pl < griesmer => (pl, KoptMethod::Plotkin),
        Some(pl) if pl == griesmer => (pl, KoptMethod::Both),
        _ => (griesmer, KoptMethod::Griesmer),
    };
    Ok(KoptBound {
        value,
        method,
        griesmer,
        plotkin,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmTerm {
    pub t: usize,
    /// `n − t(r + δ − 1)`
    pub punctured_length: i64,
    pub kopt: usize,
    pub method: KoptMethod,
    /// `t·r + kopt`
    pub value: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphabetOptimalityCertificate {
    pub p: u32,
    pub n: u64,
    pub k: usize,
    pub d: u64,
    pub r: usize,
    pub delta: usize,
    pub terms: Vec<CmTerm>,
    pub bound: usize,
    pub optimal: bool,
    /// `k` above the bound: the locality claim the caller relied on is false.
    pub violated: bool,
}

/// The alphabet-dependent bound
/// `k ≤ min_{1 ≤ t ≤ ⌈k/r⌉−1} { t·r + k_opt(n − t(r+δ−1), d) }` with `k_opt`
/// replaced by [`kopt_upper`]. The caller is responsible for having certified
/// `(r, δ)`-locality.
pub fn cm_alphabet_optimal(
    p: u32,
    n: u64,
    k: usize,
    d: u64,
    r: usize,
    delta: usize,
) -> Result<AlphabetOptimalityCertificate, BoundsError> {
    if r == 0 || delta < 2 || d == 0 || d > n || k == 0 {
        return Err(BoundsError::InvalidParams(format!(
            "need r >= 1, delta >= 2, 1 <= d <= n, k >= 1; got n={n} k={k} d={d} r={r} delta={delta}"
        )));
    }
    let t_max = k.div_ceil(r) - 1;
    if t_max < 1 {
        return Err(BoundsError::DegenerateRange { k, r });
    }
    let mut terms = Vec::with_capacity(t_max);
    for t in 1..=t_max {
        let len = n as i64 - (t * (r + delta - 1)) as i64;
        let (kopt, method) = if len < d as i64 {
            (0, KoptMethod::Trivial)
        } else {
            let b = kopt_upper(p, len as u64, d)?;
            (b.value, b.method)
        };
        terms.push(CmTerm {
            t,
            punctured_length: len,
            kopt,
            method,
            value: t * r + kopt,
        });
    }
    let bound = terms.iter().map(|t| t.value).min().expect("t range nonempty");
    Ok(AlphabetOptimalityCertificate {
        p,
        n,
        k,
        d,
        r,
        delta,
        terms,
        bound,
        optimal: k == bound,
        violated: k > bound,
    })
}

/// `k` equals the upper bound on `k_opt(n, d)`: no p-ary code with the same
/// length and distance has larger dimension, locality or not.
pub fn dimension_optimal(p: u32, n: u64, k: usize, d: u64) -> Result<bool, BoundsError> {
    Ok(kopt_upper(p, n, d)?.value == k)
}

/// `(n − k − (⌈k/r⌉ − 1)(δ − 1) + 1) − d`; zero means the Singleton-like
/// bound is met with equality.
pub fn singleton_like_defect(
    n: u64,
    k: usize,
    d: u64,
    r: usize,
    delta: usize,
) -> Result<i64, BoundsError> {
    if r == 0 || delta == 0 {
        return Err(BoundsError::InvalidParams("r and delta must be positive".into()));
    }
    let ceil = k.div_ceil(r) as i64;
    Ok(n as i64 - k as i64 - (ceil - 1) * (delta as i64 - 1) + 1 - d as i64)
}

/// Outcome of the four sufficient conditions for two blocks
/// `{A1, A2}`, `{A3, A4}` with `A3 ⊆ A1`, `A4 ⊆ A2` and `A1 ∩ A2 ≠ ∅`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectingPairsOptimality {
    /// Subsets after relabeling so that `|A3|` is the minimum size.
    pub labeled: [IndexSet; 4],
    pub relabeled: bool,
    /// Conditions (1)–(4) in order.
    pub conditions: [bool; 4],
    /// First condition that holds, 1-based.
    pub fired: Option<usize>,
    /// `distance_optimal_by_griesmer` on the enumerated code.
    pub cross_check: bool,
    /// A condition fired but the enumerated code is not provably
    /// distance-optimal.
    pub disagreement: bool,
}

fn shape_ok(p: u32, m: usize, s: &[IndexSet; 4]) -> Result<(), String> {
    let [a1, a2, a3, a4] = *s;
    if s.iter().any(|a| a.is_empty()) {
        return Err("all four subsets must be nonempty".into());
    }
    if !a3.is_subset(a1) || !a4.is_subset(a2) {
        return Err("need A3 ⊆ A1 and A4 ⊆ A2".into());
    }
    let inter = a1.intersection(a2);
    if inter.is_empty() {
        return Err("need A1 ∩ A2 nonempty".into());
    }
    if a3.is_subset(inter) || a4.is_subset(inter) {
        return Err("A3 and A4 must not lie inside A1 ∩ A2".into());
    }
    let pw = |e: usize| (p as u128).checked_pow(e as u32);
    match (pw(m), pw(a1.len()), pw(a2.len())) {
        (Some(top), Some(x), Some(y)) if top > x + y => Ok(()),
        _ => Err("need p^m > p^|A1| + p^|A2|".into()),
    }
}

fn four_conditions(p: u32, s: &[IndexSet; 4], max_multiplicity: usize) -> [bool; 4] {
    let [a1, a2, a3, a4] = *s;
    let (n1, n2, n3, n4) = (a1.len(), a2.len(), a3.len(), a4.len());
    let q = p as i128 - 1;
    let big = (p as i128).pow(a1.intersection(a2).len() as u32)
        + (p as i128).pow(a3.intersection(a4).len() as u32);
    let lhs = n3 as i128 * q;
    [
        max_multiplicity < p as usize && lhs > big - 2,
        p == 3 && n1 == n2 && n2 == n4 && n4 > n3 && lhs > big,
        p == 3 && n1 > n2 && n2 == n3 && n3 == n4 && lhs > big - q,
        p == 3 && n1 == n2 && n2 == n3 && n3 == n4 && lhs > big - q,
    ]
}

/// Evaluates the four sufficient conditions verbatim and cross-checks the
/// outcome against the Griesmer bound on the enumerated code.
///
/// When `|A4| < |A3|` the labeling `(A2, A1, A4, A3)` is used; on a tie both
/// labelings are tried and the first that fires a condition is reported.
pub fn intersecting_pairs_optimality(
    code: &DefiningCode,
) -> Result<IntersectingPairsOptimality, BoundsError> {
    let fam = code.family();
    let blocks = fam.blocks();
    if blocks.len() != 2 || blocks.iter().any(|b| b.len() != 2) {
        return Err(BoundsError::ShapeMismatch(
            "need exactly two blocks of two subsets".into(),
        ));
    }
    let p = code.field().p();
    let original = [blocks[0][0], blocks[0][1], blocks[1][0], blocks[1][1]];
    shape_ok(p, fam.m(), &original).map_err(BoundsError::ShapeMismatch)?;
    let swapped = [original[1], original[0], original[3], original[2]];
    let (n3, n4) = (original[2].len(), original[3].len());
    let candidates: Vec<(bool, [IndexSet; 4])> = match n3.cmp(&n4) {
        std::cmp::Ordering::Less => vec![(false, original)],
        std::cmp::Ordering::Greater => vec![(true, swapped)],
        std::cmp::Ordering::Equal => vec![(false, original), (true, swapped)],
    };
    let stats = family_stats(fam, p);
    let evaluated: Vec<(bool, [IndexSet; 4], [bool; 4])> = candidates
        .into_iter()
        .map(|(sw, s)| (sw, s, four_conditions(p, &s, stats.max_multiplicity)))
        .collect();
    let chosen = evaluated
        .iter()
        .find(|(_, _, c)| c.iter().any(|&x| x))
        .unwrap_or(&evaluated[0]);
    let (relabeled, labeled, conditions) = *chosen;
    let fired = conditions.iter().position(|&c| c).map(|i| i + 1);

    let params = code.parameters()?;
    let d = params.d.ok_or(BoundsError::ZeroCode)? as u64;
    let cross_check = distance_optimal_by_griesmer(p, params.n as u64, params.k, d);
    Ok(IntersectingPairsOptimality {
        labeled,
        relabeled,
        conditions,
        fired,
        cross_check,
        disagreement: fired.is_some() && !cross_check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_code;
    use crate::gf::PrimeField;
    use proptest::prelude::*;

    fn fam(m: usize, blocks: &[&[&[usize]]]) -> SubsetFamily {
        let raw: Vec<Vec<Vec<usize>>> = blocks
            .iter()
            .map(|b| b.iter().map(|s| s.to_vec()).collect())
            .collect();
        SubsetFamily::from_one_based(m, &raw).unwrap()
    }

    fn code(p: u64, f: &SubsetFamily) -> DefiningCode {
        build_code(f, &PrimeField::new(p).unwrap()).unwrap()
    }

    #[test]
    fn griesmer_sums() {
        assert_eq!(griesmer_sum(3, 3, 13), 20);
        assert_eq!(griesmer_sum(3, 4, 37), 57);
        assert_eq!(griesmer_sum(7, 1, 11), 11);
        assert_eq!(griesmer_sum(5, 3, 15), 19);
    }

    #[test]
    fn distance_optimality_by_griesmer() {
        assert!(distance_optimal_by_griesmer(3, 56, 4, 36));
        assert!(distance_optimal_by_griesmer(3, 20, 3, 13));
        assert!(!distance_optimal_by_griesmer(3, 13, 3, 8));
    }

    #[test]
    fn kopt_examples() {
        assert_eq!(kopt_upper(3, 9, 9).unwrap().value, 1);
        assert_eq!(kopt_upper(5, 15, 15).unwrap().value, 1);
        assert_eq!(kopt_upper(3, 13, 9).unwrap().value, 3);
        assert_eq!(kopt_upper(3, 5, 5).unwrap().value, 1);
        assert!(matches!(kopt_upper(3, 4, 5), Err(BoundsError::InvalidParams(_))));
    }

    #[test]
    fn cm_examples() {
        let c = cm_alphabet_optimal(5, 20, 3, 15, 2, 4).unwrap();
        assert_eq!((c.bound, c.optimal), (3, true));
        assert_eq!(c.terms[0].punctured_length, 15);
        let c = cm_alphabet_optimal(3, 8, 3, 5, 2, 2).unwrap();
        assert_eq!((c.bound, c.optimal), (3, true));
        let c = cm_alphabet_optimal(3, 13, 3, 9, 2, 3).unwrap();
        assert_eq!((c.bound, c.optimal), (3, true));
        assert_eq!(
            cm_alphabet_optimal(3, 4, 2, 3, 2, 3).unwrap_err(),
            BoundsError::DegenerateRange { k: 2, r: 2 }
        );
    }

    #[test]
    fn singleton_examples() {
        assert_eq!(singleton_like_defect(20, 3, 15, 2, 4), Ok(0));
        assert_eq!(singleton_like_defect(13, 3, 9, 2, 3), Ok(0));
        assert_eq!(singleton_like_defect(10, 2, 5, 2, 2), Ok(4));
    }

    #[test]
    fn griesmer_iff_examples() {
        let ex35 = code(3, &fam(3, &[&[&[1, 2], &[3]], &[&[1]]]));
        let cert = check_griesmer_iff(&ex35).unwrap();
        assert!(cert.is_griesmer && cert.combinatorial && !cert.conditional);
        assert_eq!(cert.max_multiplicity, 2);

        let five = code(5, &fam(3, &[&[&[1, 2], &[2, 3]]]));
        let cert = check_griesmer_iff(&five).unwrap();
        assert!(!cert.is_griesmer && !cert.combinatorial);
        assert_eq!(cert.griesmer_sum, 19);
    }

    #[test]
    fn pair_of_lines_is_not_griesmer_for_small_primes() {
        for p in [3u64, 5, 7] {
            let c = code(p, &fam(3, &[&[&[1, 2], &[2, 3]]]));
            let cert = check_griesmer_iff(&c).unwrap();
            assert_eq!(cert.n, p * p - p);
            assert_eq!(cert.d, p * p - 2 * p);
            assert!(!cert.is_griesmer);
        }
    }

    #[test]
    fn sufficient_condition_examples() {
        let ex37 = fam(4, &[&[&[1, 2, 3], &[3, 4]], &[&[1, 2], &[3, 4]]]);
        let cert = distance_optimal_sufficient(&ex37, 3).unwrap();
        assert!(cert.sufficient);
        let ex35 = fam(3, &[&[&[1, 2], &[3]], &[&[1]]]);
        assert!(distance_optimal_sufficient(&ex35, 3).unwrap().sufficient);
    }

    #[test]
    fn example_37_fires_the_unequal_sizes_branch() {
        let c = code(3, &fam(4, &[&[&[1, 2, 3], &[3, 4]], &[&[1, 2], &[3, 4]]]));
        let res = intersecting_pairs_optimality(&c).unwrap();
        assert_eq!(res.fired, Some(3));
        assert!(!res.relabeled);
        assert!(res.cross_check);
        assert!(!res.disagreement);
    }

    #[test]
    fn equal_sizes_branch_can_overclaim() {
        // Four subsets of size 3 with |A1 ∩ A2| = |A3 ∩ A4| = 1: the fourth
        // condition holds, yet a [192, 5, 127]_3 code is not excluded by the
        // Griesmer bound, and the family-level condition also fails.
        let f = fam(5, &[&[&[1, 2, 3], &[3, 4, 5]], &[&[1, 2, 3], &[3, 4, 5]]]);
        let c = code(3, &f);
        let params = c.parameters().unwrap();
        assert_eq!((params.n, params.k, params.d), (192, 5, Some(126)));
        let res = intersecting_pairs_optimality(&c).unwrap();
        assert_eq!(res.fired, Some(4));
        assert!(!res.cross_check);
        assert!(res.disagreement);
        assert!(!distance_optimal_sufficient(&f, 3).unwrap().sufficient);
    }

    #[test]
    fn shape_mismatch() {
        let c = code(3, &fam(3, &[&[&[1, 2], &[3]], &[&[1]]]));
        assert!(matches!(
            intersecting_pairs_optimality(&c),
            Err(BoundsError::ShapeMismatch(_))
        ));
        // Disjoint A1, A2.
        let c = code(3, &fam(4, &[&[&[1, 2], &[3, 4]], &[&[1], &[3]]]));
        assert!(matches!(
            intersecting_pairs_optimality(&c),
            Err(BoundsError::ShapeMismatch(_))
        ));
    }

    proptest! {
        #[test]
        fn kopt_is_monotone(p in prop::sample::select(vec![2u32, 3, 5, 7]),
                            d in 1u64..60, extra in 0u64..80, step in 1u64..10) {
            let n = d + extra;
            let base = kopt_upper(p, n + step, d).unwrap().value;
            // Shorter length never allows a larger dimension.
            prop_assert!(kopt_upper(p, n, d).unwrap().value <= base);
            // Larger distance never allows a larger dimension.
            if d + step <= n + step {
                prop_assert!(kopt_upper(p, n + step, d + step).unwrap().value <= base);
            }
        }
    }
}
