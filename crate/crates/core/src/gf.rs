//! Arithmetic in the prime field 𝔽_p and the small amount of linear algebra
//! (rank, echelon form, linear solve) the rest of the crate needs.
//!
//! Residues are always stored as least nonnegative representatives in
//! `[0, p)`, so structural equality is field equality.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest modulus accepted by [`PrimeField::new`]. Everything here is
/// exhaustive enumeration, so anything beyond desk scale is refused.
pub const MAX_MODULUS: u64 = 97;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is smaller than 2")]
    TooSmall(u64),
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported maximum {MAX_MODULUS}")]
    TooLarge(u64),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("residue {value} is not reduced modulo {p}")]
    ResidueOutOfRange { value: u64, p: u32 },
    #[error("empty input")]
    EmptyInput,
}

/// The prime field 𝔽_p together with a table of multiplicative inverses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
    inverses: Vec<u32>,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 2 {
            return Err(FieldError::TooSmall(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p > MAX_MODULUS {
            return Err(FieldError::TooLarge(p));
        }
        let p32 = p as u32;
        let mut inverses = vec![0u32; p as usize];
        for a in 1..p32 {
            // Brute force is fine for p <= 97.
            let inv = (1..p32)
                .find(|b| (a * b) % p32 == 1)
                .expect("every nonzero residue of a prime field is invertible");
            inverses[a as usize] = inv;
        }
        Ok(Self { p: p32, inverses })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Maps any integer to its least nonnegative residue.
    #[inline]
    pub fn reduce(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.p - b) % self.p
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        (self.p - a) % self.p
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        (a * b) % self.p
    }

    /// Multiplicative inverse, `None` for zero.
    #[inline]
    pub fn inv(&self, a: u32) -> Option<u32> {
        match a % self.p {
            0 => None,
            a => Some(self.inverses[a as usize]),
        }
    }

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Builds a vector after checking that every coordinate is reduced.
    pub fn vector(&self, coords: &[u32]) -> Result<FpVector, FieldError> {
        if let Some(&bad) = coords.iter().find(|&&c| c >= self.p) {
            return Err(FieldError::ResidueOutOfRange {
                value: bad as u64,
                p: self.p,
            });
        }
        Ok(FpVector(coords.to_vec()))
    }

    /// Builds a vector from arbitrary integers, reducing each one.
    pub fn vector_reduced(&self, coords: &[i64]) -> FpVector {
        FpVector(coords.iter().map(|&c| self.reduce(c)).collect())
    }

    pub fn dot(&self, x: &FpVector, y: &FpVector) -> Result<u32, FieldError> {
        check_len(x.len(), y.len())?;
        Ok(self.dot_unchecked(&x.0, &y.0))
    }

    #[inline]
    pub(crate) fn dot_unchecked(&self, x: &[u32], y: &[u32]) -> u32 {
        let p = self.p as u64;
        let s: u64 = x.iter().zip(y).map(|(&a, &b)| a as u64 * b as u64).sum();
        (s % p) as u32
    }

    pub fn scale(&self, a: u32, x: &FpVector) -> FpVector {
        FpVector(x.0.iter().map(|&c| self.mul(a, c)).collect())
    }

    /// `x + a·y`
    pub fn add_scaled(&self, x: &FpVector, a: u32, y: &FpVector) -> Result<FpVector, FieldError> {
        check_len(x.len(), y.len())?;
        Ok(FpVector(
            x.0.iter()
                .zip(&y.0)
                .map(|(&u, &v)| self.add(u, self.mul(a, v)))
                .collect(),
        ))
    }

    /// Rank of the matrix whose columns are `columns`.
    pub fn matrix_rank(&self, columns: &[FpVector]) -> Result<usize, FieldError> {
        let first = columns.first().ok_or(FieldError::EmptyInput)?;
        for c in columns {
            check_len(first.len(), c.len())?;
        }
        // Row rank of the transpose equals column rank; eliminating on the
        // column list directly avoids building the transpose.
        let rows: Vec<Vec<u32>> = columns.iter().map(|c| c.0.clone()).collect();
        Ok(self.row_echelon(rows).len())
    }

    /// Reduced row echelon form; returns only the nonzero rows.
    ///
    /// Pivots are chosen as the first row (in order) with a nonzero entry in
    /// the current column, so the result is deterministic.
    pub fn row_echelon(&self, mut rows: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
        let width = rows.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..width {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let inv = self.inv(rows[rank][col]).expect("pivot is nonzero");
            for v in rows[rank].iter_mut() {
                *v = self.mul(*v, inv);
            }
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == rank || row[col] == 0 {
                    continue;
                }
                let factor = row[col];
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v = self.sub(*v, self.mul(factor, pv));
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rows.truncate(rank);
        rows
    }

    /// Finds coefficients `c` with `Σ c_j · columns[j] = target`, if any.
    pub fn solve(
        &self,
        columns: &[FpVector],
        target: &FpVector,
    ) -> Result<Option<Vec<u32>>, FieldError> {
        let first = columns.first().ok_or(FieldError::EmptyInput)?;
        let m = first.len();
        for c in columns {
            check_len(m, c.len())?;
        }
        check_len(m, target.len())?;
        let k = columns.len();
        // Augmented system, one row per coordinate.
        let rows: Vec<Vec<u32>> = (0..m)
            .map(|i| {
                let mut row: Vec<u32> = columns.iter().map(|c| c.0[i]).collect();
                row.push(target.0[i]);
                row
            })
            .collect();
        let reduced = self.row_echelon(rows);
        let mut solution = vec![0u32; k];
        for row in &reduced {
            match row.iter().position(|&v| v != 0) {
                Some(lead) if lead == k => return Ok(None),
                Some(lead) => solution[lead] = row[k],
                None => {}
            }
        }
        Ok(Some(solution))
    }

    /// Iterates over every vector of 𝔽_p^len in lexicographic order.
    pub fn all_vectors(&self, len: usize) -> impl Iterator<Item = FpVector> + '_ {
        let total = (self.p as u64).pow(len as u32);
        (0..total).map(move |idx| FpVector(self.digits(idx, len)))
    }

    /// Base-p digits of `idx`, most significant first, padded to `len`.
    pub(crate) fn digits(&self, mut idx: u64, len: usize) -> Vec<u32> {
        let p = self.p as u64;
        let mut out = vec![0u32; len];
        for slot in out.iter_mut().rev() {
            *slot = (idx % p) as u32;
            idx /= p;
        }
        out
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

fn check_len(left: usize, right: usize) -> Result<(), FieldError> {
    if left != right {
        return Err(FieldError::DimensionMismatch { left, right });
    }
    Ok(())
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A coordinate vector over 𝔽_p. The field is not stored; vectors are built
/// through [`PrimeField::vector`] which checks every coordinate is reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FpVector(pub(crate) Vec<u32>);

impl FpVector {
    pub fn zero(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn construction_and_inverse_table() {
        assert_eq!(f(5).inv(2), Some(3));
        assert_eq!(f(3).inv(2), Some(2));
        assert_eq!(PrimeField::new(4), Err(FieldError::NotPrime(4)));
        assert_eq!(PrimeField::new(1), Err(FieldError::TooSmall(1)));
        assert_eq!(PrimeField::new(0), Err(FieldError::TooSmall(0)));
        assert_eq!(PrimeField::new(101), Err(FieldError::TooLarge(101)));
        assert!(PrimeField::new(97).is_ok());
        assert!(PrimeField::new(2).is_ok());
        for p in [2u64, 3, 5, 7, 11, 13, 97] {
            let fld = f(p);
            assert_eq!(fld.inv(0), None);
            for a in 1..p as u32 {
                assert_eq!(fld.mul(a, fld.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn dot_products() {
        let fld = f(5);
        let v = |c: &[u32]| fld.vector(c).unwrap();
        assert_eq!(fld.dot(&v(&[1, 2, 3]), &v(&[1, 1, 1])), Ok(1));
        assert_eq!(fld.dot(&v(&[0, 0, 0]), &v(&[4, 4, 4])), Ok(0));
        assert_eq!(fld.dot(&v(&[1, 2]), &v(&[2, 4])), Ok(0));
        assert_eq!(
            fld.dot(&v(&[1, 2]), &v(&[2, 4, 1])),
            Err(FieldError::DimensionMismatch { left: 2, right: 3 })
        );
        assert!(matches!(
            fld.vector(&[5]),
            Err(FieldError::ResidueOutOfRange { value: 5, p: 5 })
        ));
    }

    #[test]
    fn rank_examples() {
        let f3 = f(3);
        let e = |c: &[u32]| f3.vector(c).unwrap();
        assert_eq!(
            f3.matrix_rank(&[e(&[1, 0, 0]), e(&[0, 1, 0]), e(&[0, 0, 1])]),
            Ok(3)
        );
        let f5 = f(5);
        let v = |c: &[u32]| f5.vector(c).unwrap();
        assert_eq!(f5.matrix_rank(&[v(&[1, 2]), v(&[2, 4])]), Ok(1));
        assert_eq!(f5.matrix_rank(&[]), Err(FieldError::EmptyInput));
        assert_eq!(f5.matrix_rank(&[v(&[0, 0])]), Ok(0));
    }

    #[test]
    fn rank_of_displayed_five_ary_generator() {
        // The 3 x 20 generator matrix listed for p = 5, m = 3.
        let f5 = f(5);
        let row2 = [1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4, 0, 0, 0, 0];
        let row3 = [1, 2, 3, 4, 1, 2, 3, 4, 1, 2, 3, 4, 1, 2, 3, 4, 1, 2, 3, 4];
        let cols: Vec<FpVector> = (0..20)
            .map(|j| f5.vector(&[1, row2[j], row3[j]]).unwrap())
            .collect();
        assert_eq!(f5.matrix_rank(&cols), Ok(3));
    }

    #[test]
    fn field_axioms_exhaustive_small_primes() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let fld = f(p);
            let p = p as u32;
            for a in 0..p {
                assert_eq!(fld.add(a, fld.neg(a)), 0);
                assert_eq!(fld.sub(a, a), 0);
                for b in 0..p {
                    assert_eq!(fld.add(a, b), fld.add(b, a));
                    assert_eq!(fld.mul(a, b), fld.mul(b, a));
                    assert_eq!(fld.add(fld.sub(a, b), b), a);
                    for c in 0..p {
                        assert_eq!(fld.add(fld.add(a, b), c), fld.add(a, fld.add(b, c)));
                        assert_eq!(fld.mul(fld.mul(a, b), c), fld.mul(a, fld.mul(b, c)));
                        assert_eq!(
                            fld.mul(a, fld.add(b, c)),
                            fld.add(fld.mul(a, b), fld.mul(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn solve_recovers_combination() {
        let f5 = f(5);
        let v = |c: &[u32]| f5.vector(c).unwrap();
        let cols = [v(&[1, 0, 1]), v(&[0, 1, 1])];
        let target = v(&[2, 3, 0]);
        assert_eq!(f5.solve(&cols, &target).unwrap(), Some(vec![2, 3]));
        assert_eq!(f5.solve(&cols, &v(&[1, 1, 1])).unwrap(), None);
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..50).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]
        );
    }

    fn small_matrix() -> impl Strategy<Value = (u64, Vec<Vec<u32>>, Vec<usize>, Vec<u32>)> {
        (prop_oneof![Just(3u64), Just(5u64)], 1usize..=4, 1usize..=5).prop_flat_map(
            |(p, m, ncols)| {
                let pm = p as u32;
                (
                    Just(p),
                    prop::collection::vec(prop::collection::vec(0..pm, m), ncols),
                    Just((0..ncols).collect::<Vec<_>>()).prop_shuffle(),
                    prop::collection::vec(1..pm, ncols),
                )
            },
        )
    }

    proptest! {
        #[test]
        fn rank_invariant_under_permutation_and_scaling((p, cols, perm, scales) in small_matrix()) {
            let fld = f(p);
            let cols: Vec<FpVector> = cols.iter().map(|c| fld.vector(c).unwrap()).collect();
            let base = fld.matrix_rank(&cols).unwrap();
            let moved: Vec<FpVector> = perm
                .iter()
                .map(|&j| fld.scale(scales[j], &cols[j]))
                .collect();
            prop_assert_eq!(fld.matrix_rank(&moved).unwrap(), base);
            prop_assert!(base <= cols.len().min(cols[0].len()));
        }
    }
}
