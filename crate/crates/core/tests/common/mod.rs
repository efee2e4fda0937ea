//! Shared fixtures for integration tests: small exhaustive family sweeps.

#![allow(dead_code)]

use projcode::{IndexSet, SubsetFamily};

/// All nonempty subsets of `[m]`, as bitmask sets in increasing order.
pub fn nonempty_subsets(m: usize) -> Vec<IndexSet> {
    (1u32..(1 << m)).map(IndexSet::from_bits).collect()
}

/// Multisets of `k` subsets drawn from `pool`, as nondecreasing index lists.
fn multisets(pool: &[IndexSet], k: usize) -> Vec<Vec<IndexSet>> {
    fn rec(pool: &[IndexSet], start: usize, k: usize, cur: &mut Vec<IndexSet>, out: &mut Vec<Vec<IndexSet>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i]);
            rec(pool, i, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(pool, 0, k, &mut Vec::new(), &mut out);
    out
}

/// Every family with one or two blocks and at most `max_len` nonempty
/// subsets in total. Two-block families are listed once per unordered pair.
pub fn sweep_families(m: usize, max_len: usize) -> Vec<SubsetFamily> {
    let pool = nonempty_subsets(m);
    let mut blocks_by_len: Vec<Vec<Vec<IndexSet>>> = vec![Vec::new()];
    for k in 1..=max_len {
        blocks_by_len.push(multisets(&pool, k));
    }
    let mut out = Vec::new();
    for blocks in &blocks_by_len[1..] {
        for b in blocks {
            out.push(SubsetFamily::new(m, vec![b.clone()]).unwrap());
        }
    }
    for k1 in 1..max_len {
        for k2 in k1..=(max_len - k1) {
            for (i, b1) in blocks_by_len[k1].iter().enumerate() {
                for (j, b2) in blocks_by_len[k2].iter().enumerate() {
                    if k1 == k2 && j < i {
                        continue;
                    }
                    out.push(SubsetFamily::new(m, vec![b1.clone(), b2.clone()]).unwrap());
                }
            }
        }
    }
    out
}

/// The sweep restricted to families meeting the construction hypotheses.
pub fn hypothesis_sweep(p: u32, m: usize, max_len: usize) -> Vec<SubsetFamily> {
    sweep_families(m, max_len)
        .into_iter()
        .filter(|f| f.construction_hypotheses(p).holds)
        .collect()
}
