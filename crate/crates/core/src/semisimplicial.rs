//! Finite semisimplicial sets (face maps only) and the semisimplicial set
//! associated to an ordered simplicial complex.

use std::collections::HashMap;

use crate::chain::{ChainComplex, HomologyReport, SparseMatrix};
use crate::error::{input, Result};
use crate::simplicial::{Face, SimplicialComplex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiSimplicialSet {
    counts: Vec<usize>,
    /// `faces[p][s][i]` is the index of `d_i` of simplex `s` in degree `p − 1`.
    faces: Vec<Vec<Vec<usize>>>,
}

impl SemiSimplicialSet {
    /// `faces[0]` must be empty lists (or omitted entirely by passing an empty
    /// outer vector for degree 0).
    pub fn new(counts: Vec<usize>, mut faces: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if faces.len() + 1 == counts.len() {
            faces.insert(0, vec![Vec::new(); counts.first().copied().unwrap_or(0)]);
        }
        if faces.len() != counts.len() {
            return input("need face data for every degree");
        }
        for (p, fs) in faces.iter().enumerate() {
            if fs.len() != counts[p] {
                return input(format!("degree {p}: {} face lists for {} simplices", fs.len(), counts[p]));
            }
            for (s, d) in fs.iter().enumerate() {
                let want = if p == 0 { 0 } else { p + 1 };
                if d.len() != want || (p > 0 && d.iter().any(|&x| x >= counts[p - 1])) {
                    return input(format!("simplex {s} in degree {p} has bad faces {d:?}"));
                }
            }
        }
        let x = Self { counts, faces };
        x.check_identities()?;
        Ok(x)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn face(&self, p: usize, s: usize, i: usize) -> usize {
        self.faces[p][s][i]
    }

    /// `d_i d_j = d_{j−1} d_i` for `i < j`, exhaustively.
    pub fn check_identities(&self) -> Result<()> {
        for p in 2..self.counts.len() {
            for s in 0..self.counts[p] {
                for j in 1..=p {
                    for i in 0..j {
                        let lhs = self.face(p - 1, self.face(p, s, j), i);
                        let rhs = self.face(p - 1, self.face(p, s, i), j - 1);
                        if lhs != rhs {
                            return input(format!("d{i} d{j} != d{} d{i} on simplex {s} of degree {p}", j - 1));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `∂ = Σ (−1)^i d_i`, degrees `0..=top`, augmented.
    pub fn chain_complex(&self, top: usize) -> ChainComplex {
        let count = |p: usize| self.counts.get(p).copied().unwrap_or(0);
        let mut boundaries = vec![SparseMatrix::zeros(0, count(0))];
        for p in 1..=top {
            let mut m = SparseMatrix::zeros(count(p - 1), 0);
            for s in 0..count(p) {
                m.push_column((0..=p).map(|i| (self.face(p, s, i), if i % 2 == 0 { 1 } else { -1 })));
            }
            boundaries.push(m);
        }
        ChainComplex::new((0..=top).map(count).collect(), boundaries, true)
    }

    pub fn homology(&self, max_degree: usize) -> HomologyReport {
        self.chain_complex(max_degree + 1).homology(max_degree)
    }

    /// The torus from a square with one diagonal: one vertex, edges
    /// `a, b, c` (horizontal, vertical, diagonal) and two triangles.
    pub fn torus() -> Self {
        let faces = vec![vec![Vec::new()], vec![vec![0, 0]; 3], vec![vec![1, 2, 0], vec![0, 2, 1]]];
        Self::new(vec![1, 3, 2], faces).expect("torus satisfies the identities")
    }
}

/// `K_•`: `p`-simplices are the injective maps `[p] → K` onto faces, i.e.
/// ordered tuples of distinct vertices spanning a face; `d_i` drops entry `i`.
#[derive(Clone, Debug)]
pub struct AssociatedSet {
    pub set: SemiSimplicialSet,
    /// Tuples per degree, lexicographically sorted.
    pub tuples: Vec<Vec<Vec<usize>>>,
    faces: Vec<Vec<Face>>,
}

fn permutations(face: &[usize]) -> Vec<Vec<usize>> {
    if face.len() <= 1 {
        return vec![face.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..face.len() {
        let mut rest = face.to_vec();
        let first = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, first);
            out.push(p);
        }
    }
    out
}

fn permutation_sign(t: &[usize]) -> i64 {
    let inversions = (0..t.len()).flat_map(|i| (i + 1..t.len()).map(move |j| (i, j))).filter(|&(i, j)| t[i] > t[j]).count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

impl AssociatedSet {
    pub fn new(k: &SimplicialComplex, max_dim: usize) -> Self {
        let faces: Vec<Vec<Face>> = (0..=max_dim).map(|p| k.faces(p)).collect();
        let tuples: Vec<Vec<Vec<usize>>> = faces.iter().map(|fs| {
            let mut ts: Vec<Vec<usize>> = fs.iter().flat_map(|f| permutations(f)).collect();
            ts.sort();
            ts
        }).collect();
        let index: Vec<HashMap<&Vec<usize>, usize>> = tuples.iter().map(|ts| ts.iter().enumerate().map(|(i, t)| (t, i)).collect()).collect();
        let mut face_maps = vec![vec![Vec::new(); tuples[0].len()]];
        for p in 1..=max_dim {
            face_maps.push(tuples[p].iter().map(|t| (0..=p).map(|i| {
                let mut d = t.clone();
                d.remove(i);
                index[p - 1][&d]
            }).collect()).collect());
        }
        let set = SemiSimplicialSet::new(tuples.iter().map(Vec::len).collect(), face_maps).expect("face maps of K_• satisfy the identities");
        Self { set, tuples, faces }
    }

    /// Order-induced section `C_p(K) → C_p(K_•)`: a face goes to its
    /// increasing tuple.
    pub fn section(&self, p: usize) -> SparseMatrix {
        let mut m = SparseMatrix::zeros(self.tuples[p].len(), 0);
        for f in &self.faces[p] {
            let row = self.tuples[p].binary_search(f).expect("increasing tuple present");
            m.push_column([(row, 1)]);
        }
        m
    }

    /// Canonical surjection `C_p(K_•) → C_p(K)`: a tuple goes to its face
    /// times the sign of the sorting permutation.
    pub fn surjection(&self, p: usize) -> SparseMatrix {
        let mut m = SparseMatrix::zeros(self.faces[p].len(), 0);
        for t in &self.tuples[p] {
            let mut f = t.clone();
            f.sort_unstable();
            let row = self.faces[p].binary_search(&f).expect("face present");
            m.push_column([(row, permutation_sign(t))]);
        }
        m
    }
}
