//! Finite abstract simplicial complexes stored by their facets.
//!
//! Vertices carry labels `0..vertex_count`; the vertex set of a complex is
//! the union of its facets, so links and full subcomplexes keep the labels
//! of the ambient complex.

use std::collections::{BTreeSet, HashMap};

use crate::chain::{ChainComplex, HomologyReport, SparseMatrix};
use crate::error::{input, Result};

/// A face as a strictly increasing list of vertex labels.
pub type Face = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertex_count: usize,
    facets: Vec<Face>,
    flag_graph: Option<Vec<Vec<usize>>>,
}

/// Sorted, duplicate-free copy of `face`; `None` on repeated vertices.
pub fn normalize_face(face: &[usize]) -> Option<Face> {
    let mut f = face.to_vec();
    f.sort_unstable();
    let len = f.len();
    f.dedup();
    (f.len() == len).then_some(f)
}

/// `a ⊆ b` for sorted faces.
pub fn is_subface(a: &[usize], b: &[usize]) -> bool {
    let mut it = b.iter();
    a.iter().all(|x| it.any(|y| y == x))
}

/// All `k`-element subsets of a sorted face, in lexicographic order.
pub fn subsets_of_size(face: &[usize], k: usize) -> Vec<Face> {
    fn rec(face: &[usize], k: usize, start: usize, cur: &mut Face, out: &mut Vec<Face>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..face.len() {
            if face.len() - i < k - cur.len() {
                break;
            }
            cur.push(face[i]);
            rec(face, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= face.len() {
        rec(face, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Keeps only inclusion-maximal faces, sorted lexicographically.
fn maximal_faces(mut faces: Vec<Face>) -> Vec<Face> {
    faces.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    faces.dedup();
    let mut kept: Vec<Face> = Vec::new();
    for f in faces {
        if !kept.iter().any(|k| is_subface(&f, k)) {
            kept.push(f);
        }
    }
    kept.sort();
    kept
}

impl SimplicialComplex {
    /// A complex from a list of faces; non-maximal faces are dropped.
    pub fn new(vertex_count: usize, faces: Vec<Face>) -> Result<Self> {
        let mut clean = Vec::with_capacity(faces.len());
        for f in faces {
            let Some(n) = normalize_face(&f) else {
                return input(format!("face {f:?} repeats a vertex"));
            };
            if let Some(&v) = n.last() {
                if v >= vertex_count {
                    return input(format!("vertex {v} out of range 0..{vertex_count}"));
                }
                clean.push(n);
            }
        }
        Ok(Self { vertex_count, facets: maximal_faces(clean), flag_graph: None })
    }

    /// The complex with no vertices (only the empty face).
    pub fn empty(vertex_count: usize) -> Self {
        Self { vertex_count, facets: Vec::new(), flag_graph: None }
    }

    /// The full simplex on `0..=n`.
    pub fn simplex(n: usize) -> Self {
        Self { vertex_count: n + 1, facets: vec![(0..=n).collect()], flag_graph: None }
    }

    /// `∂Δⁿ` on `0..=n`.
    pub fn boundary_of_simplex(n: usize) -> Self {
        let full: Face = (0..=n).collect();
        Self { vertex_count: n + 1, facets: subsets_of_size(&full, n), flag_graph: None }
    }

    /// The clique complex of a graph on `0..vertex_count`; every vertex is
    /// present even when isolated.
    pub fn flag(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![BTreeSet::new(); vertex_count];
        for &(a, b) in edges {
            if a >= vertex_count || b >= vertex_count || a == b {
                return input(format!("bad edge ({a}, {b}) on {vertex_count} vertices"));
            }
            adj[a].insert(b);
            adj[b].insert(a);
        }
        let adj: Vec<Vec<usize>> = adj.into_iter().map(|s| s.into_iter().collect()).collect();
        let vertices: Vec<usize> = (0..vertex_count).collect();
        Ok(Self::flag_on(vertex_count, &vertices, adj))
    }

    /// Clique complex of `adj` restricted to `vertices`.
    fn flag_on(vertex_count: usize, vertices: &[usize], adj: Vec<Vec<usize>>) -> Self {
        let keep: BTreeSet<usize> = vertices.iter().copied().collect();
        let adj: Vec<Vec<usize>> = adj.into_iter().enumerate().map(|(v, n)| if keep.contains(&v) { n.into_iter().filter(|u| keep.contains(u)).collect() } else { Vec::new() }).collect();
        let mut cliques = Vec::new();
        bron_kerbosch(&adj, Vec::new(), keep.iter().copied().collect(), BTreeSet::new(), &mut cliques);
        for c in &mut cliques {
            c.sort_unstable();
        }
        cliques.sort();
        Self { vertex_count, facets: cliques, flag_graph: Some(adj) }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn facets(&self) -> &[Face] {
        &self.facets
    }

    pub fn is_flag_declared(&self) -> bool {
        self.flag_graph.is_some()
    }

    pub fn vertices(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.facets.iter().flatten().copied().collect();
        set.into_iter().collect()
    }

    /// No vertices.
    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    /// Dimension; `-1` for the empty complex.
    pub fn dim(&self) -> i64 {
        self.facets.iter().map(|f| f.len() as i64 - 1).max().unwrap_or(-1)
    }

    /// Whether a (not necessarily sorted) vertex set is a face. The empty
    /// set is always a face.
    pub fn contains_face(&self, face: &[usize]) -> bool {
        match normalize_face(face) {
            Some(f) => f.is_empty() || self.facets.iter().any(|g| is_subface(&f, g)),
            None => false,
        }
    }

    /// All `k`-dimensional faces, lexicographically sorted.
    pub fn faces(&self, k: usize) -> Vec<Face> {
        let set: BTreeSet<Face> = self.facets.iter().flat_map(|f| subsets_of_size(f, k + 1)).collect();
        set.into_iter().collect()
    }

    /// All nonempty faces by ascending dimension.
    pub fn all_faces(&self) -> Vec<Face> {
        (0..=self.dim().max(-1)).flat_map(|k| self.faces(k as usize)).collect()
    }

    /// `f_k` for `k = 0..=dim`.
    pub fn f_vector(&self) -> Vec<usize> {
        (0..=self.dim()).map(|k| self.faces(k as usize).len()).collect()
    }

    /// `χ̃ = −1 + Σ (−1)^k f_k`.
    pub fn reduced_euler(&self) -> i64 {
        -1 + self.f_vector().iter().enumerate().map(|(k, &f)| if k % 2 == 0 { f as i64 } else { -(f as i64) }).sum::<i64>()
    }

    /// The 1-skeleton as sorted edges.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.faces(1).into_iter().map(|e| (e[0], e[1])).collect()
    }

    /// Whether every clique of the 1-skeleton is a face.
    pub fn is_flag(&self) -> bool {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (a, b) in self.edges() {
            adj[a].push(b);
            adj[b].push(a);
        }
        let clique = Self::flag_on(self.vertex_count, &self.vertices(), adj);
        clique.facets == self.facets
    }

    /// Simplicial chain complex in degrees `0..=top`, augmented.
    pub fn chain_complex(&self, top: usize) -> ChainComplex {
        let faces: Vec<Vec<Face>> = (0..=top).map(|k| self.faces(k)).collect();
        let index: Vec<HashMap<&Face, usize>> = faces.iter().map(|fs| fs.iter().enumerate().map(|(i, f)| (f, i)).collect()).collect();
        let mut boundaries = vec![SparseMatrix::zeros(0, faces[0].len())];
        for k in 1..=top {
            let mut m = SparseMatrix::zeros(faces[k - 1].len(), 0);
            for f in &faces[k] {
                m.push_column((0..f.len()).map(|i| {
                    let mut g = f.clone();
                    g.remove(i);
                    (index[k - 1][&g], if i % 2 == 0 { 1 } else { -1 })
                }));
            }
            boundaries.push(m);
        }
        ChainComplex::new(faces.iter().map(Vec::len).collect(), boundaries, true)
    }

    pub fn homology(&self, max_degree: usize) -> HomologyReport {
        self.chain_complex(max_degree + 1).homology(max_degree)
    }

    /// `Lk(σ)`: faces `τ` disjoint from `σ` with `σ ∪ τ` a face.
    pub fn link(&self, sigma: &[usize]) -> Result<SimplicialComplex> {
        let Some(s) = normalize_face(sigma) else {
            return input(format!("{sigma:?} repeats a vertex"));
        };
        if !self.contains_face(&s) {
            return input(format!("{s:?} is not a face"));
        }
        let faces: Vec<Face> = self.facets.iter().filter(|f| is_subface(&s, f)).map(|f| f.iter().copied().filter(|v| s.binary_search(v).is_err()).collect::<Face>()).filter(|f| !f.is_empty()).collect();
        let mut out = Self { vertex_count: self.vertex_count, facets: maximal_faces(faces), flag_graph: None };
        if let Some(adj) = &self.flag_graph {
            let verts = out.vertices();
            out.flag_graph = Some(adj.iter().enumerate().map(|(v, n)| if verts.binary_search(&v).is_ok() { n.iter().copied().filter(|u| verts.binary_search(u).is_ok()).collect() } else { Vec::new() }).collect());
        }
        Ok(out)
    }

    /// Closed star `v ∗ Lk(v)`.
    pub fn closed_star(&self, v: usize) -> SimplicialComplex {
        let facets = self.facets.iter().filter(|f| f.binary_search(&v).is_ok()).cloned().collect();
        Self { vertex_count: self.vertex_count, facets, flag_graph: None }
    }

    /// `X ∗ Y`; the vertices of `Y` are shifted by `X.vertex_count()`.
    pub fn join(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let shift = self.vertex_count;
        let shifted: Vec<Face> = other.facets.iter().map(|f| f.iter().map(|v| v + shift).collect()).collect();
        let facets = match (self.facets.is_empty(), shifted.is_empty()) {
            (true, _) => shifted,
            (false, true) => self.facets.clone(),
            (false, false) => self.facets.iter().flat_map(|f| shifted.iter().map(move |g| f.iter().chain(g).copied().collect())).collect(),
        };
        Self { vertex_count: shift + other.vertex_count, facets: maximal_faces(facets), flag_graph: None }
    }

    /// All faces with every vertex in `subset`.
    pub fn full_subcomplex(&self, subset: &[usize]) -> SimplicialComplex {
        let keep: BTreeSet<usize> = subset.iter().copied().collect();
        let faces = self.facets.iter().map(|f| f.iter().copied().filter(|v| keep.contains(v)).collect::<Face>()).filter(|f| !f.is_empty()).collect();
        Self { vertex_count: self.vertex_count, facets: maximal_faces(faces), flag_graph: None }
    }

    /// Every face of `self` is a face of `other`.
    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.facets.iter().all(|f| other.contains_face(f))
    }

    /// Same faces with a larger label universe.
    pub fn with_vertex_count(&self, vertex_count: usize) -> Result<SimplicialComplex> {
        if self.vertices().last().is_some_and(|&v| v >= vertex_count) {
            return input("vertex labels exceed the new vertex count");
        }
        Ok(Self { vertex_count, ..self.clone() })
    }
}

fn bron_kerbosch(adj: &[Vec<usize>], r: Vec<usize>, p: BTreeSet<usize>, mut x: BTreeSet<usize>, out: &mut Vec<Face>) {
    if p.is_empty() {
        if x.is_empty() && !r.is_empty() {
            out.push(r);
        }
        return;
    }
    let pivot = *p.iter().chain(x.iter()).max_by_key(|&&u| adj[u].iter().filter(|w| p.contains(w)).count()).expect("nonempty");
    let candidates: Vec<usize> = p.iter().copied().filter(|v| adj[pivot].binary_search(v).is_err()).collect();
    let mut p = p;
    for v in candidates {
        let nbrs: BTreeSet<usize> = adj[v].iter().copied().collect();
        let mut r2 = r.clone();
        r2.push(v);
        bron_kerbosch(adj, r2, p.intersection(&nbrs).copied().collect(), x.intersection(&nbrs).copied().collect(), out);
        p.remove(&v);
        x.insert(v);
    }
}

/// The 6-vertex triangulation of the real projective plane.
pub fn projective_plane_6() -> SimplicialComplex {
    let facets = [[0, 1, 3], [0, 1, 5], [0, 2, 4], [0, 2, 5], [0, 3, 4], [1, 2, 3], [1, 2, 4], [1, 4, 5], [2, 3, 5], [3, 4, 5]];
    SimplicialComplex::new(6, facets.iter().map(|f| f.to_vec()).collect()).expect("valid facets")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn cx(n: usize, facets: &[&[usize]]) -> SimplicialComplex {
        SimplicialComplex::new(n, facets.iter().map(|f| f.to_vec()).collect()).unwrap()
    }

    #[test]
    fn link_examples() {
        let s = SimplicialComplex::boundary_of_simplex(3);
        let l = s.link(&[0]).unwrap();
        assert_eq!(l.facets(), &[vec![1, 2], vec![1, 3], vec![2, 3]]);
        let l = s.link(&[0, 1]).unwrap();
        assert_eq!(l.facets(), &[vec![2], vec![3]]);
        assert_eq!(s.link(&[]).unwrap(), s);
        assert!(s.link(&[0, 1, 2, 3]).is_err());
        assert!(s.link(&[0, 1, 2]).unwrap().is_empty());
    }

    #[test]
    fn join_examples() {
        let s0 = cx(2, &[&[0], &[1]]);
        let circle = s0.join(&s0);
        assert_eq!(circle.facets().len(), 4);
        assert_eq!(circle.f_vector(), vec![4, 4]);
        let h = circle.homology(1);
        assert_eq!(h.unreduced(1).betti, 1);
        assert_eq!(h.unreduced(0).betti, 1);
        let point = SimplicialComplex::simplex(0);
        let tri = SimplicialComplex::boundary_of_simplex(2);
        assert_eq!(point.join(&tri).facets().len(), tri.facets().len());
        assert_eq!(SimplicialComplex::empty(0).join(&tri), tri);
    }

    #[test]
    fn full_subcomplex_examples() {
        let s = SimplicialComplex::boundary_of_simplex(3);
        assert_eq!(s.full_subcomplex(&[0, 1, 2, 3]), s);
        assert!(s.full_subcomplex(&[]).is_empty());
        assert_eq!(s.full_subcomplex(&[0, 1, 2]).facets(), &[vec![0, 1, 2]]);
    }

    #[test]
    fn homology_goldens() {
        let h = SimplicialComplex::boundary_of_simplex(2).homology(1);
        assert_eq!((h.unreduced(0).betti, h.unreduced(1).betti), (1, 1));
        let h = SimplicialComplex::boundary_of_simplex(3).homology(2);
        assert_eq!(h.unreduced.iter().map(|g| g.betti).collect::<Vec<_>>(), vec![1, 0, 1]);
        let rp2 = projective_plane_6();
        assert_eq!(rp2.f_vector(), vec![6, 15, 10]);
        let h = rp2.homology(2);
        assert_eq!(h.unreduced(0).betti, 1);
        assert_eq!((h.unreduced(1).betti, h.unreduced(1).torsion.clone()), (0, vec![BigInt::from(2)]));
        assert!(h.unreduced(2).is_zero());
        assert_eq!(h.euler_from_betti(), 1);
    }

    #[test]
    fn reduced_homology_of_empty_and_points() {
        let e = SimplicialComplex::empty(0).homology(0);
        assert_eq!(e.reduced(-1).betti, 1);
        let two = cx(2, &[&[0], &[1]]).homology(0);
        assert_eq!(two.reduced(0).betti, 1);
        assert_eq!(two.reduced(-1).betti, 0);
    }

    #[test]
    fn flag_complex_from_graph() {
        let k4 = SimplicialComplex::flag(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(k4.facets(), &[vec![0, 1, 2, 3]]);
        let c4 = SimplicialComplex::flag(5, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert_eq!(c4.facets().len(), 5);
        assert!(c4.is_flag());
        assert!(!SimplicialComplex::boundary_of_simplex(2).is_flag());
    }

    fn graph_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (1usize..=10).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            let len = pairs.len();
            (Just(n), proptest::collection::vec(any::<bool>(), len)).prop_map(move |(n, keep)| (n, pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| *p).collect()))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn clique_complex_matches_expanded((n, edges) in graph_strategy()) {
            let flag = SimplicialComplex::flag(n, &edges).unwrap();
            // Expanded: every vertex subset that is pairwise adjacent.
            let adj: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
            let mut faces = Vec::new();
            for mask in 1u32..(1 << n) {
                let f: Face = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
                if f.iter().enumerate().all(|(i, &a)| f[i + 1..].iter().all(|&b| adj.contains(&(a, b)))) {
                    faces.push(f);
                }
            }
            let expanded = SimplicialComplex::new(n, faces).unwrap();
            prop_assert_eq!(flag.facets(), expanded.facets());
            let top = flag.dim().max(0) as usize;
            prop_assert_eq!(flag.homology(top), expanded.homology(top));
        }

        #[test]
        fn euler_from_homology((n, edges) in graph_strategy()) {
            let x = SimplicialComplex::flag(n, &edges).unwrap();
            let top = x.dim().max(0) as usize;
            prop_assert_eq!(x.homology(top).euler_from_betti(), x.reduced_euler() + 1);
        }

        #[test]
        fn join_reduced_euler((n, e1) in graph_strategy(), (m, e2) in graph_strategy()) {
            let x = SimplicialComplex::flag(n.min(5), &e1.into_iter().filter(|&(a, b)| a < 5 && b < 5).collect::<Vec<_>>()).unwrap();
            let y = SimplicialComplex::flag(m.min(5), &e2.into_iter().filter(|&(a, b)| a < 5 && b < 5).collect::<Vec<_>>()).unwrap();
            prop_assert_eq!(x.join(&y).reduced_euler(), -x.reduced_euler() * y.reduced_euler());
        }
    }
}
