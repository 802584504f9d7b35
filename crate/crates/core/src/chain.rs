//! Finite chain complexes of free abelian groups and their integral homology.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::matrix::IntMatrix;

/// A sparse integer matrix stored by columns; `(row, value)` pairs sorted by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub columns: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, columns: vec![Vec::new(); cols] }
    }

    /// Builds a column from possibly repeated entries, summing duplicates.
    pub fn push_column(&mut self, entries: impl IntoIterator<Item = (usize, i64)>) {
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        for (r, v) in entries {
            assert!(r < self.rows, "row {r} out of range");
            *acc.entry(r).or_insert(0) += v;
        }
        self.columns.push(acc.into_iter().filter(|&(_, v)| v != 0).collect());
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn to_dense(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, self.cols());
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                m[(r, c)] = BigInt::from(v);
            }
        }
        m
    }

    /// `self · other`, dense.
    pub fn mul(&self, other: &SparseMatrix) -> IntMatrix {
        assert_eq!(self.cols(), other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols());
        for (c, col) in other.columns.iter().enumerate() {
            for &(k, v) in col {
                for &(r, w) in &self.columns[k] {
                    out[(r, c)] += BigInt::from(v) * BigInt::from(w);
                }
            }
        }
        out
    }

    /// Rank and the invariant factors greater than one.
    pub fn rank_and_torsion(&self) -> (usize, Vec<BigInt>) {
        match unit_eliminate(self) {
            Some((units, residual)) => {
                let factors = residual.invariant_factors();
                (units + factors.len(), torsion_of(&factors))
            }
            None => {
                let factors = self.to_dense().invariant_factors();
                (factors.len(), torsion_of(&factors))
            }
        }
    }
}

fn torsion_of(factors: &[BigInt]) -> Vec<BigInt> {
    factors.iter().map(Signed::abs).filter(|d| !d.is_one()).collect()
}

/// Eliminates unit pivots (row and column operations are unimodular, so the
/// invariant factors of the residual plus one `1` per pivot are those of the
/// input). Returns `None` if an entry overflows `i64`.
fn unit_eliminate(m: &SparseMatrix) -> Option<(usize, IntMatrix)> {
    let mut cols: Vec<BTreeMap<usize, i64>> = m.columns.iter().map(|c| c.iter().copied().collect()).collect();
    let mut row_index: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.rows];
    for (c, col) in cols.iter().enumerate() {
        for &r in col.keys() {
            row_index[r].insert(c);
        }
    }
    let mut alive: BTreeSet<usize> = (0..cols.len()).filter(|&c| !cols[c].is_empty()).collect();
    let mut units = 0;
    loop {
        // Sparsest column holding a unit, then the sparsest unit row in it.
        let mut best: Option<(usize, usize, usize)> = None;
        for &c in &alive {
            let len = cols[c].len();
            if best.is_some_and(|(bl, _, _)| bl <= len) {
                continue;
            }
            let pivot_row = cols[c].iter().filter(|(_, v)| v.abs() == 1).min_by_key(|(r, _)| (row_index[**r].len(), **r)).map(|(r, _)| *r);
            if let Some(r) = pivot_row {
                best = Some((len, c, r));
            }
        }
        let Some((_, pc, pr)) = best else { break };
        let pv = cols[pc][&pr];
        let pivot_col: Vec<(usize, i64)> = cols[pc].iter().map(|(&r, &v)| (r, v)).collect();
        let others: Vec<usize> = row_index[pr].iter().copied().filter(|&c| c != pc).collect();
        for c in others {
            // column c -= (a[pr][c] / pv) * column pc
            let factor = cols[c][&pr] * pv;
            for &(r, v) in &pivot_col {
                let entry = cols[c].entry(r).or_insert(0);
                *entry = entry.checked_sub(factor.checked_mul(v)?)?;
                if *entry == 0 {
                    cols[c].remove(&r);
                    row_index[r].remove(&c);
                } else {
                    row_index[r].insert(c);
                }
            }
            if cols[c].is_empty() {
                alive.remove(&c);
            }
        }
        // Row pr now meets only column pc; drop both.
        for &(r, _) in &pivot_col {
            row_index[r].remove(&pc);
        }
        cols[pc].clear();
        alive.remove(&pc);
        units += 1;
    }
    let rows: Vec<usize> = (0..m.rows).filter(|&r| !row_index[r].is_empty()).collect();
    let row_pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let live: Vec<usize> = alive.into_iter().collect();
    let mut residual = IntMatrix::zeros(rows.len(), live.len());
    for (j, &c) in live.iter().enumerate() {
        for (&r, &v) in &cols[c] {
            residual[(row_pos[&r], j)] = BigInt::from(v);
        }
    }
    Some((units, residual))
}

/// `H_k` as `ℤ^betti ⊕ ⨁ ℤ/t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub degree: i64,
    pub betti: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

impl std::fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        match self.betti {
            0 => {}
            1 => parts.push("Z".to_string()),
            b => parts.push(format!("Z^{b}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

/// Unreduced homology in degrees `0..=max_degree` and reduced homology in
/// degrees `-1..=max_degree`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub max_degree: usize,
    pub unreduced: Vec<HomologyGroup>,
    pub reduced: Vec<HomologyGroup>,
    /// Ranks of the chain groups in degrees `0..=max_degree + 1`.
    pub chain_ranks: Vec<usize>,
}

impl HomologyReport {
    pub fn unreduced(&self, k: usize) -> &HomologyGroup {
        &self.unreduced[k]
    }

    /// Reduced homology in degree `k ≥ -1`.
    pub fn reduced(&self, k: i64) -> &HomologyGroup {
        &self.reduced[(k + 1) as usize]
    }

    pub fn euler_from_betti(&self) -> i64 {
        self.unreduced.iter().map(|g| if g.degree % 2 == 0 { g.betti as i64 } else { -(g.betti as i64) }).sum()
    }
}

/// `C_0 ← C_1 ← …` with `boundaries[k] : C_k → C_{k−1}` for `k ≥ 1`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    ranks: Vec<usize>,
    boundaries: Vec<SparseMatrix>,
    augmented: bool,
}

impl ChainComplex {
    /// `boundaries[0]` is ignored; pass an empty placeholder. Panics if
    /// `∂∘∂ ≠ 0`.
    pub fn new(ranks: Vec<usize>, mut boundaries: Vec<SparseMatrix>, augmented: bool) -> Self {
        assert_eq!(ranks.len(), boundaries.len());
        boundaries[0] = SparseMatrix::zeros(0, ranks.first().copied().unwrap_or(0));
        for k in 1..ranks.len() {
            assert_eq!((boundaries[k].rows, boundaries[k].cols()), (ranks[k - 1], ranks[k]), "boundary {k} has the wrong shape");
            if k >= 2 {
                assert!(boundaries[k - 1].mul(&boundaries[k]).is_zero(), "boundary of boundary is nonzero in degree {k}");
            }
        }
        Self { ranks, boundaries, augmented }
    }

    /// `∂_k : C_k → C_{k−1}` for `1 ≤ k ≤ top`.
    pub fn boundary(&self, k: usize) -> &SparseMatrix {
        &self.boundaries[k]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    fn rank_of(&self, k: usize) -> usize {
        self.ranks.get(k).copied().unwrap_or(0)
    }

    fn boundary_data(&self, k: usize) -> (usize, Vec<BigInt>) {
        if k == 0 || k >= self.ranks.len() {
            (0, Vec::new())
        } else {
            self.boundaries[k].rank_and_torsion()
        }
    }

    /// Homology up to `max_degree`. The complex must carry chains up to
    /// degree `max_degree + 1` (missing degrees count as zero).
    pub fn homology(&self, max_degree: usize) -> HomologyReport {
        let data: Vec<(usize, Vec<BigInt>)> = (0..=max_degree + 1).map(|k| self.boundary_data(k)).collect();
        let mut unreduced = Vec::new();
        for k in 0..=max_degree {
            let betti = self.rank_of(k) - data[k].0 - data[k + 1].0;
            unreduced.push(HomologyGroup { degree: k as i64, betti, torsion: data[k + 1].1.clone() });
        }
        // The augmentation C_0 → ℤ is onto exactly when C_0 ≠ 0.
        let nonempty = self.rank_of(0) > 0;
        let mut reduced = vec![HomologyGroup { degree: -1, betti: usize::from(self.augmented && !nonempty), torsion: Vec::new() }];
        for g in &unreduced {
            let mut g = g.clone();
            if g.degree == 0 && nonempty && self.augmented {
                g.betti -= 1;
            }
            reduced.push(g);
        }
        HomologyReport { max_degree, unreduced, reduced, chain_ranks: (0..=max_degree + 1).map(|k| self.rank_of(k)).collect() }
    }
}

/// The invariant factors of a dense matrix (pure SNF path), for cross-checks.
pub fn dense_rank_and_torsion(m: &IntMatrix) -> (usize, Vec<BigInt>) {
    let f = m.invariant_factors();
    (f.len(), torsion_of(&f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sparse_from(rows: usize, cols: usize, entries: &[i64]) -> SparseMatrix {
        let mut m = SparseMatrix::zeros(rows, 0);
        for c in 0..cols {
            m.push_column((0..rows).map(|r| (r, entries[r * cols + c])));
        }
        m
    }

    #[test]
    fn unit_elimination_keeps_torsion() {
        // [[2, 0], [0, 1]] and a matrix with no unit entries.
        let m = sparse_from(2, 2, &[2, 0, 0, 1]);
        assert_eq!(m.rank_and_torsion(), (2, vec![BigInt::from(2)]));
        let m = sparse_from(2, 2, &[2, 4, 6, 8]);
        assert_eq!(m.rank_and_torsion(), dense_rank_and_torsion(&m.to_dense()));
    }

    proptest! {
        #[test]
        fn sparse_matches_dense(rows in 1usize..6, cols in 1usize..6, seed in proptest::collection::vec(-3i64..=3, 36)) {
            let m = sparse_from(rows, cols, &seed[..rows * cols]);
            prop_assert_eq!(m.rank_and_torsion(), dense_rank_and_torsion(&m.to_dense()));
        }
    }
}
