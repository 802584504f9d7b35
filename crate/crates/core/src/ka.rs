//! Coefficient-bounded truncations of the complex whose vertices are
//! morphisms `H → M` and whose simplices are sets of vertices with pairwise
//! `λ`-orthogonal images, together with swap automorphisms, transitivity
//! and cancellation witnesses built from paths in it.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cm::{connectivity_report, is_lcm};
use crate::error::{input, Error, Result};
use crate::matrix::IntMatrix;
use crate::quadratic::{orthogonal_complement, IntVector, QModMorphism, QuadraticModule};
use crate::reduction::{kernel_restriction, DEFAULT_SEARCH_DEPTH};
use crate::search::indexed_morphisms;
use crate::simplicial::SimplicialComplex;

/// Truncations with more vertices are not turned into explicit simplicial
/// complexes.
pub const MAX_MATERIALIZED_VERTICES: usize = 6_000;

/// Edge lists are only produced up to this many vertices.
pub const MAX_EDGE_LIST_VERTICES: usize = 60_000;

/// Cap on hub vertices used by the large-graph connectivity pass.
const MAX_HUBS: usize = 4_096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KaVertex {
    pub index: usize,
    pub morphism: QModMorphism,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Self(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: u32) -> bool {
        self.0[i as usize / 64] >> (i % 64) & 1 == 1
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn ones(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                (rest != 0).then(|| {
                    let b = rest.trailing_zeros();
                    rest &= rest - 1;
                    (w * 64) as u32 + b
                })
            })
        })
    }
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n as u32).collect())
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            let p = self.0[x as usize];
            self.0[x as usize] = self.0[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller root wins so that labels are deterministic.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi as usize] = lo;
        }
    }
}

/// How a component count was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentMethod {
    Exhaustive,
    /// Unions along verified edges only; exact whenever it reports one
    /// component, and followed by an exhaustive pass otherwise.
    Hubs,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Components {
    pub count: usize,
    /// Component sizes, largest first.
    pub sizes: Vec<usize>,
    pub method: ComponentMethod,
}

/// The truncation of `K^a(M)` to morphisms with entries in `[−bound, bound]`.
///
/// Vertices are stored as pairs of indices into a table of candidate column
/// vectors; `orth[u]` marks the table vectors `λ`-orthogonal to vector `u`.
pub struct KaComplex {
    ambient: QuadraticModule,
    bound: u32,
    h: QuadraticModule,
    table: Vec<IntVector>,
    table_index: HashMap<IntVector, u32>,
    orth: Vec<Bits>,
    vertices: Vec<[u32; 2]>,
    lookup: HashMap<[u32; 2], u32>,
    /// `by_first[x]`: `(y, vertex)` for vertices with first column `x`,
    /// ascending in the vertex index.
    by_first: Vec<Vec<(u32, u32)>>,
}

impl std::fmt::Debug for KaComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KaComplex").field("rank", &self.ambient.rank()).field("bound", &self.bound).field("vertices", &self.vertices.len()).finish()
    }
}

fn to_i64_vec(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(ToPrimitive::to_i64).collect()
}

impl KaComplex {
    pub fn build(m: &QuadraticModule, bound: u32) -> Result<Self> {
        if bound == 0 {
            return input("coefficient bound must be at least 1");
        }
        let h = QuadraticModule::hyperbolic(m.param(), 1);
        let n = m.rank();
        let (table, tuples) = if n < 2 {
            (Vec::new(), Vec::new())
        } else {
            let im = indexed_morphisms(&h, m, bound)?;
            (im.table, im.tuples)
        };
        let small: Vec<Vec<i64>> = table.iter().map(|v| to_i64_vec(v)).collect::<Option<_>>().ok_or_else(|| Error::Unsupported("table entries exceed i64".into()))?;
        let gram: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| m.gram()[(i, j)].to_i128()).collect::<Option<_>>()).collect::<Option<_>>().ok_or_else(|| Error::Unsupported("Gram entries exceed i128".into()))?;
        // Row vectors xᵀG, then orthogonality bitsets.
        let rows: Vec<Vec<i128>> = small.iter().map(|x| (0..n).map(|j| (0..n).map(|i| x[i] as i128 * gram[i][j]).sum()).collect()).collect();
        let orth: Vec<Bits> = rows
            .par_iter()
            .map(|r| {
                let mut b = Bits::new(small.len());
                for (v, y) in small.iter().enumerate() {
                    if r.iter().zip(y).map(|(a, &b)| a * b as i128).sum::<i128>() == 0 {
                        b.set(v);
                    }
                }
                b
            })
            .collect();
        let vertices: Vec<[u32; 2]> = tuples.iter().map(|t| [t[0], t[1]]).collect();
        let lookup = vertices.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
        let mut by_first = vec![Vec::new(); table.len()];
        for (i, &[x, y]) in vertices.iter().enumerate() {
            by_first[x as usize].push((y, i as u32));
        }
        let table_index = table.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
        Ok(Self { ambient: m.clone(), bound, h, table, table_index, orth, vertices, lookup, by_first })
    }

    pub fn ambient(&self) -> &QuadraticModule {
        &self.ambient
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn matrix(&self, i: usize) -> IntMatrix {
        let [x, y] = self.vertices[i];
        IntMatrix::from_columns(self.ambient.rank(), &[self.table[x as usize].clone(), self.table[y as usize].clone()])
    }

    pub fn vertex(&self, i: usize) -> KaVertex {
        KaVertex { index: i, morphism: QModMorphism { source: self.h.clone(), target: self.ambient.clone(), matrix: self.matrix(i) } }
    }

    pub fn vertices(&self) -> impl Iterator<Item = KaVertex> + '_ {
        (0..self.vertex_count()).map(|i| self.vertex(i))
    }

    /// Index of the vertex with this matrix, if it lies in the truncation.
    pub fn index_of(&self, matrix: &IntMatrix) -> Option<usize> {
        if matrix.shape() != (self.ambient.rank(), 2) {
            return None;
        }
        let x = *self.table_index.get(&matrix.column(0))?;
        let y = *self.table_index.get(&matrix.column(1))?;
        self.lookup.get(&[x, y]).map(|&i| i as usize)
    }

    /// Table vectors orthogonal to both columns of vertex `i`.
    fn perp(&self, i: usize) -> Bits {
        let [x, y] = self.vertices[i];
        self.orth[x as usize].and(&self.orth[y as usize])
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        let ([x0, y0], [x1, y1]) = (self.vertices[i], self.vertices[j]);
        let (a, b) = (&self.orth[x0 as usize], &self.orth[y0 as usize]);
        a.get(x1) && a.get(y1) && b.get(x1) && b.get(y1)
    }

    fn neighbors_in(&self, perp: &Bits) -> Vec<u32> {
        let mut out: Vec<u32> = perp.ones().flat_map(|x| self.by_first[x as usize].iter().filter(|(y, _)| perp.get(*y)).map(|&(_, v)| v)).collect();
        out.sort_unstable();
        out
    }

    /// Neighbors of vertex `i` in increasing index order.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        self.neighbors_in(&self.perp(i)).into_iter().map(|v| v as usize).collect()
    }

    fn has_neighbor(&self, i: usize) -> bool {
        let p = self.perp(i);
        let found = p.ones().any(|x| self.by_first[x as usize].iter().any(|(y, _)| p.get(*y)));
        found
    }

    pub fn edges(&self) -> Result<Vec<(usize, usize)>> {
        if self.vertex_count() > MAX_EDGE_LIST_VERTICES {
            return Err(Error::ResourceLimit(format!("{} vertices is too many to list edges", self.vertex_count())));
        }
        let lists: Vec<Vec<(usize, usize)>> = (0..self.vertex_count()).into_par_iter().map(|i| self.neighbors(i).into_iter().filter(|&j| j > i).map(|j| (i, j)).collect()).collect();
        Ok(lists.into_iter().flatten().collect())
    }

    pub fn is_materializable(&self) -> bool {
        self.vertex_count() <= MAX_MATERIALIZED_VERTICES
    }

    /// The truncation as an explicit flag complex on `0..vertex_count`.
    pub fn to_simplicial(&self) -> Result<SimplicialComplex> {
        if !self.is_materializable() {
            return Err(Error::ResourceLimit(format!("{} vertices is too many to materialize", self.vertex_count())));
        }
        SimplicialComplex::flag(self.vertex_count(), &self.edges()?)
    }

    pub fn components(&self) -> Components {
        let n = self.vertex_count();
        if n <= MAX_EDGE_LIST_VERTICES {
            let mut uf = UnionFind::new(n);
            for (a, b) in self.edges().expect("within the edge-list cap") {
                uf.union(a as u32, b as u32);
            }
            return summarize(&mut uf, ComponentMethod::Exhaustive);
        }
        let mut uf = self.hub_unions();
        let c = summarize(&mut uf, ComponentMethod::Hubs);
        if c.count <= 1 {
            return c;
        }
        let lists: Vec<Vec<u32>> = (0..n).into_par_iter().map(|i| self.neighbors_in(&self.perp(i))).collect();
        for (i, l) in lists.iter().enumerate() {
            for &j in l {
                uf.union(i as u32, j);
            }
        }
        summarize(&mut uf, ComponentMethod::Exhaustive)
    }

    /// Unions every vertex with a neighbor among a small set of sparse
    /// vertices, or with all of its neighbors when it has none there.
    fn hub_unions(&self) -> UnionFind {
        let n = self.vertex_count();
        let support = |i: usize| self.matrix(i).entries().iter().filter(|e| !e.is_zero()).count();
        let mut order: Vec<(usize, usize)> = (0..n).into_par_iter().map(|i| (support(i), i)).collect();
        order.sort_unstable();
        let hubs: Vec<usize> = order.iter().take(MAX_HUBS).map(|&(_, i)| i).collect();
        let mut uf = UnionFind::new(n);
        for (k, &a) in hubs.iter().enumerate() {
            for &b in &hubs[k + 1..] {
                if self.adjacent(a, b) {
                    uf.union(a as u32, b as u32);
                }
            }
        }
        let links: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let p = self.perp(i);
                match hubs.iter().find(|&&hb| {
                    let [x, y] = self.vertices[hb];
                    p.get(x) && p.get(y)
                }) {
                    Some(&hb) => vec![hb as u32],
                    None => self.neighbors_in(&p),
                }
            })
            .collect();
        for (i, l) in links.iter().enumerate() {
            for &j in l {
                uf.union(i as u32, j);
            }
        }
        uf
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() > 0 && self.components().count == 1
    }

    /// Lexicographically smallest shortest path from `from` to `to`, or
    /// `None` if they lie in different components.
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        if from == to {
            return Some(vec![from]);
        }
        if self.adjacent(from, to) {
            return Some(vec![from, to]);
        }
        let common = self.perp(from).and(&self.perp(to));
        if let Some(&mid) = self.neighbors_in(&common).first() {
            return Some(vec![from, mid as usize, to]);
        }
        // Distances to `to`, then a greedy walk through smallest indices.
        let mut dist = vec![u32::MAX; self.vertex_count()];
        dist[to] = 0;
        let mut queue = VecDeque::from([to]);
        while let Some(v) = queue.pop_front() {
            if v == from {
                break;
            }
            for u in self.neighbors(v) {
                if dist[u] == u32::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        if dist[from] == u32::MAX {
            return None;
        }
        let mut path = vec![from];
        let mut cur = from;
        while cur != to {
            cur = self.neighbors(cur).into_iter().find(|&u| dist[u] < dist[cur] && dist[u] + 1 == dist[cur]).expect("distance decreases along a shortest path");
            path.push(cur);
        }
        Some(path)
    }

    pub fn transitivity_witness(&self, h0: &QModMorphism, h1: &QModMorphism) -> Result<Option<TransitivityWitness>> {
        check_vertex(h0, &self.ambient)?;
        check_vertex(h1, &self.ambient)?;
        if h0.matrix == h1.matrix {
            let path = self.index_of(&h0.matrix).into_iter().collect();
            return Ok(Some(TransitivityWitness { path, automorphism: QModMorphism::identity(&self.ambient) }));
        }
        let (Some(a), Some(b)) = (self.index_of(&h0.matrix), self.index_of(&h1.matrix)) else { return Ok(None) };
        let Some(path) = self.shortest_path(a, b) else { return Ok(None) };
        let mut f = QModMorphism::identity(&self.ambient);
        for w in path.windows(2) {
            let s = swap_automorphism(&self.vertex(w[0]).morphism, &self.vertex(w[1]).morphism)?;
            f = f.then(&s)?;
        }
        if f.matrix.mul(&h0.matrix) != h1.matrix {
            return Err(Error::Unsupported("composed swaps do not carry h0 to h1".into()));
        }
        Ok(Some(TransitivityWitness { path, automorphism: f }))
    }

    /// The connectivity and local Cohen–Macaulay clauses for `g_claim`,
    /// checked on this truncation. Large truncations support connectivity
    /// up to degree 0 and the local clause up to 1.
    pub fn theorem32_evidence(&self, g_claim: i64, max_degree: i64, pi1_budget: usize) -> Result<Vec<Thm32Clause>> {
        if g_claim > 0 {
            let (g, _) = self.ambient.witt_index_lower_bound(self.bound)?;
            if (g as i64) < g_claim && self.ambient.stable_witt_lower_bound(1, self.bound)? < g_claim {
                return input(format!("stable Witt index not certified to be at least {g_claim} at bound {}", self.bound));
            }
        }
        let materialized = if self.is_materializable() { Some(self.to_simplicial()?) } else { None };
        let clause = |clause, status| Thm32Clause { claim: "thm32".into(), g: g_claim, bound: self.bound, clause, status, evidence_only: true };
        let conn = (g_claim - 4).div_euclid(2).min(max_degree);
        let conn_status = if conn <= -2 {
            Status::Vacuous
        } else {
            let ok = match (&materialized, conn) {
                (Some(x), d) => connectivity_report(x, d, pi1_budget).certified,
                (None, -1) => self.vertex_count() > 0,
                (None, 0) => self.is_connected(),
                (None, d) => return Err(Error::ResourceLimit(format!("{d}-connectivity of a truncation with {} vertices", self.vertex_count()))),
            };
            Status::from(ok)
        };
        let l = (g_claim - 1).div_euclid(2);
        let lcm_status = if l <= 0 {
            Status::Vacuous
        } else {
            let ok = match (&materialized, l) {
                (Some(x), l) => is_lcm(x, l, pi1_budget).holds,
                // Only vertex links are constrained, and only to be nonempty.
                (None, 1) => (0..self.vertex_count()).into_par_iter().all(|i| self.has_neighbor(i)),
                (None, l) => return Err(Error::ResourceLimit(format!("lCM >= {l} on a truncation with {} vertices", self.vertex_count()))),
            };
            Status::from(ok)
        };
        Ok(vec![clause(Clause::Connectivity, conn_status), clause(Clause::Lcm, lcm_status)])
    }
}

fn summarize(uf: &mut UnionFind, method: ComponentMethod) -> Components {
    let n = uf.0.len();
    let mut sizes: HashMap<u32, usize> = HashMap::new();
    for i in 0..n as u32 {
        *sizes.entry(uf.find(i)).or_default() += 1;
    }
    let mut sizes: Vec<usize> = sizes.into_values().collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Components { count: sizes.len(), sizes, method }
}

fn check_vertex(h: &QModMorphism, m: &QuadraticModule) -> Result<()> {
    if h.source != QuadraticModule::hyperbolic(m.param(), 1) || &h.target != m {
        return input("expected a morphism H -> M");
    }
    if !h.is_valid() {
        return input("vertex matrix is not a morphism");
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Clause {
    Connectivity,
    Lcm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
}

impl From<bool> for Status {
    fn from(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// One clause of the evidence report. A failure on a truncation does not
/// refute anything about the full complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thm32Clause {
    pub claim: String,
    pub g: i64,
    pub bound: u32,
    pub clause: Clause,
    pub status: Status,
    pub evidence_only: bool,
}

pub fn build_ka(m: &QuadraticModule, bound: u32) -> Result<KaComplex> {
    KaComplex::build(m, bound)
}

pub fn theorem32_evidence(m: &QuadraticModule, g_claim: i64, bound: u32, max_degree: i64, pi1_budget: usize) -> Result<Vec<Thm32Clause>> {
    KaComplex::build(m, bound)?.theorem32_evidence(g_claim, max_degree, pi1_budget)
}

/// An automorphism of `M` exchanging the images of two orthogonal vertices:
/// split `M = h0(H) ⊕ h1(H) ⊕ M′` and swap the first two summands.
pub fn swap_automorphism(h0: &QModMorphism, h1: &QModMorphism) -> Result<QModMorphism> {
    let m = &h0.target;
    check_vertex(h0, m)?;
    check_vertex(h1, m)?;
    if !h0.matrix.transpose().mul(m.gram()).mul(&h1.matrix).is_zero() {
        return input("vertices are not orthogonal");
    }
    let j = QModMorphism::new(QuadraticModule::hyperbolic(m.param(), 2), m.clone(), h0.matrix.hstack(&h1.matrix))?;
    let p = orthogonal_complement(&j)?.change_of_basis;
    let p_inv = p.unimodular_inverse().ok_or_else(|| Error::Unsupported("splitting is not unimodular".into()))?;
    let n = m.rank();
    let mut s = IntMatrix::zeros(n, n);
    for c in 0..n {
        let r = match c {
            0 | 1 => c + 2,
            2 | 3 => c - 2,
            _ => c,
        };
        s[(r, c)] = BigInt::from(1);
    }
    let f = QModMorphism::new(m.clone(), m.clone(), p.mul(&s).mul(&p_inv))?;
    if !f.matrix.is_unimodular() || f.matrix.mul(&h0.matrix) != h1.matrix || f.matrix.mul(&h1.matrix) != h0.matrix {
        return Err(Error::Unsupported("swap failed to verify".into()));
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitivityWitness {
    /// Vertex indices `h0 = v₀, …, v_k = h1`; empty when `h0 = h1` lies
    /// outside the truncation.
    pub path: Vec<usize>,
    /// `f` with `f ∘ h0 = h1`.
    pub automorphism: QModMorphism,
}

pub fn transitivity_witness(m: &QuadraticModule, h0: &QModMorphism, h1: &QModMorphism, bound: u32) -> Result<Option<TransitivityWitness>> {
    KaComplex::build(m, bound)?.transitivity_witness(h0, h1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CancellationWitness {
    /// Automorphism of `N ⊕ H` with `α ∘ φ|_H = ι`.
    pub alpha: QModMorphism,
    pub path: Vec<usize>,
    pub isomorphism: QModMorphism,
}

/// Given `φ : M ⊕ H → N ⊕ H`, moves `φ|_H` onto the standard inclusion by a
/// path in the truncation of `K^a(N ⊕ H)` and reads off `M → N` from the
/// corrected map.
pub fn cancellation_witness(m: &QuadraticModule, n: &QuadraticModule, phi: &QModMorphism, bound: u32) -> Result<Option<CancellationWitness>> {
    let h = QuadraticModule::hyperbolic(m.param(), 1);
    let (mh, nh) = (m.direct_sum(&h)?, n.direct_sum(&h)?);
    if phi.source != mh || phi.target != nh {
        return input("phi must map M + H to N + H");
    }
    if !phi.is_isomorphism() {
        return input("phi is not an isomorphism");
    }
    let (mr, nr) = (m.rank(), n.rank());
    let iota = QModMorphism { source: h.clone(), target: nh.clone(), matrix: IntMatrix::identity(nr + 2).column_range(nr, nr + 2) };
    let restricted = QModMorphism { source: h, target: nh.clone(), matrix: phi.matrix.column_range(mr, mr + 2) };
    let (alpha, path) = if mr == 0 {
        // N ⊕ H = H: φ itself is an automorphism.
        (phi.inverse().expect("checked isomorphism"), Vec::new())
    } else {
        match KaComplex::build(&nh, bound)?.transitivity_witness(&restricted, &iota)? {
            Some(w) => (w.automorphism, w.path),
            None => return Ok(None),
        }
    };
    let psi = alpha.matrix.mul(&phi.matrix);
    debug_assert_eq!(psi.column_range(mr, mr + 2), iota.matrix);
    if !psi.row_range(nr, nr + 2).column_range(0, mr).is_zero() {
        return Err(Error::Unsupported("corrected map does not preserve the complement".into()));
    }
    let isomorphism = QModMorphism::new(m.clone(), n.clone(), psi.row_range(0, nr).column_range(0, mr))?;
    if !isomorphism.is_isomorphism() {
        return Err(Error::Unsupported("induced map is not invertible".into()));
    }
    Ok(Some(CancellationWitness { alpha, path, isomorphism }))
}

/// A path of length at most 2 from `h` to `h0` whose middle vertex is built
/// inside `h0(H)^⊥ ∩ h(H)^⊥` by two kernel restrictions. Requires a bounded
/// witness for `g(h0(H)^⊥) ≥ 3`; `Ok(None)` when a restriction search fails.
pub fn prop43_connect(h: &QModMorphism, h0: &QModMorphism, bound: u32) -> Result<Option<Vec<QModMorphism>>> {
    let m = &h0.target;
    check_vertex(h, m)?;
    check_vertex(h0, m)?;
    if h.matrix == h0.matrix {
        return Ok(Some(vec![h0.clone()]));
    }
    let gram = m.gram();
    let orthogonal = |a: &QModMorphism, b: &QModMorphism| a.matrix.transpose().mul(gram).mul(&b.matrix).is_zero();
    if orthogonal(h, h0) {
        return Ok(Some(vec![h.clone(), h0.clone()]));
    }
    let comp = orthogonal_complement(h0)?;
    let (g, psi) = comp.module.witt_index_lower_bound(bound)?;
    if g < 3 {
        return input(format!("complement of h0 has Witt index lower bound {g} < 3 at bound {bound}"));
    }
    let h3 = QuadraticModule::hyperbolic(m.param(), 3);
    let phi = QModMorphism::new(h3, m.clone(), comp.basis.mul(&psi.matrix.column_range(0, 6)))?;
    let row = h.matrix.transpose().mul(gram);
    let mut cur = phi;
    for k in 0..2 {
        cur = match kernel_restriction(&cur, &row.row(k), DEFAULT_SEARCH_DEPTH) {
            Ok(kr) => kr.ambient,
            Err(Error::NotFound(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
    }
    let middle = cur.matrix.column_range(0, 2);
    let h1 = QModMorphism::new(QuadraticModule::hyperbolic(m.param(), 1), m.clone(), middle)?;
    if !orthogonal(h, &h1) || !orthogonal(&h1, h0) {
        return Err(Error::Unsupported("middle vertex failed the orthogonality check".into()));
    }
    Ok(Some(vec![h.clone(), h1, h0.clone()]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::FormParameter;
    use crate::pi1::DEFAULT_PI1_BUDGET;

    fn hyp(p: FormParameter, g: usize) -> QuadraticModule {
        QuadraticModule::hyperbolic(p, g)
    }

    /// Standard inclusion of block `k` into `H^g`.
    fn copy(p: FormParameter, g: usize, k: usize) -> QModMorphism {
        QModMorphism::new(hyp(p, 1), hyp(p, g), IntMatrix::identity(2 * g).column_range(2 * k, 2 * k + 2)).unwrap()
    }

    #[test]
    fn symmetric_rank_two_has_four_isolated_vertices() {
        let k = build_ka(&hyp(FormParameter::SYMMETRIC_EVEN, 1), 1).unwrap();
        assert_eq!(k.vertex_count(), 4);
        assert!(k.edges().unwrap().is_empty());
        // Oracle: the four matrices are the signed permutations (e,f) ↦ ±(e,f), ±(f,e).
        let mut ms: Vec<Vec<i64>> = k.vertices().map(|v| v.morphism.matrix.entries().iter().map(|e| e.to_i64().unwrap()).collect()).collect();
        ms.sort();
        assert_eq!(ms, vec![vec![-1, 0, 0, -1], vec![0, -1, -1, 0], vec![0, 1, 1, 0], vec![1, 0, 0, 1]]);
    }

    #[test]
    fn rank_zero_is_empty() {
        for p in FormParameter::ALL {
            let k = build_ka(&QuadraticModule::zero(p), 2).unwrap();
            assert_eq!(k.vertex_count(), 0);
            assert!(k.to_simplicial().unwrap().is_empty());
        }
    }

    #[test]
    fn standard_copies_span_an_edge() {
        for p in FormParameter::ALL {
            let k = build_ka(&hyp(p, 2), 1).unwrap();
            let a = k.index_of(&copy(p, 2, 0).matrix).unwrap();
            let b = k.index_of(&copy(p, 2, 1).matrix).unwrap();
            assert!(k.adjacent(a, b));
            assert!(k.to_simplicial().unwrap().contains_face(&[a.min(b), a.max(b)]));
        }
    }

    #[test]
    fn adjacency_matches_pairwise_lambda() {
        let p = FormParameter::SKEW_ALL;
        let k = build_ka(&hyp(p, 2), 1).unwrap();
        let g = k.ambient().gram().clone();
        let n = k.vertex_count().min(150);
        for i in 0..n {
            for j in 0..n {
                let direct = k.matrix(i).transpose().mul(&g).mul(&k.matrix(j)).is_zero();
                assert_eq!(k.adjacent(i, j), direct, "{i} {j}");
            }
            let nb = k.neighbors(i);
            assert!(nb.windows(2).all(|w| w[0] < w[1]));
            assert!(nb.iter().all(|&j| k.adjacent(i, j)));
        }
    }

    #[test]
    fn vertices_match_direct_enumeration() {
        for p in FormParameter::ALL {
            let m = hyp(p, 2);
            let k = build_ka(&m, 1).unwrap();
            let direct = m.enumerate_hyperbolic_morphisms(1, 1).unwrap();
            assert_eq!(k.vertex_count(), direct.len());
            for (i, d) in direct.iter().enumerate() {
                assert_eq!(k.matrix(i), d.matrix);
            }
        }
    }

    #[test]
    fn flag_cliques_are_pairwise_orthogonal() {
        let m = hyp(FormParameter::SKEW_EVEN, 3);
        let k = build_ka(&m, 1).unwrap();
        let keep = 600;
        let edges: Vec<(usize, usize)> = k.edges().unwrap().into_iter().filter(|&(a, b)| a < keep && b < keep).collect();
        let x = SimplicialComplex::flag(keep, &edges).unwrap();
        for f in x.all_faces().into_iter().filter(|f| f.len() <= 4) {
            let cols: Vec<IntMatrix> = f.iter().map(|&i| k.matrix(i)).collect();
            let joint = cols.iter().skip(1).fold(cols[0].clone(), |acc, c| acc.hstack(c));
            let pulled = joint.transpose().mul(m.gram()).mul(&joint);
            // Block-diagonal with H blocks: the joint map is a morphism out of H^|f|.
            assert_eq!(pulled, hyp(m.param(), f.len()).gram().clone());
        }
    }

    #[test]
    fn evidence_examples() {
        let r = theorem32_evidence(&hyp(FormParameter::SKEW_EVEN, 2), 2, 1, 3, DEFAULT_PI1_BUDGET).unwrap();
        assert_eq!(r[0].status, Status::Pass);
        assert_eq!(r[1].status, Status::Vacuous);
        let r = theorem32_evidence(&hyp(FormParameter::SYMMETRIC_EVEN, 1), 1, 1, 3, DEFAULT_PI1_BUDGET).unwrap();
        assert!(r.iter().all(|c| c.status == Status::Vacuous && c.evidence_only));
        let json = serde_json::to_value(&r[0]).unwrap();
        assert_eq!(json, serde_json::json!({"claim": "thm32", "g": 1, "bound": 1, "clause": "connectivity", "status": "vacuous", "evidence_only": true}));
        assert!(theorem32_evidence(&hyp(FormParameter::SKEW_EVEN, 1), 3, 1, 3, DEFAULT_PI1_BUDGET).is_err());
    }

    #[test]
    fn swap_of_standard_copies_is_block_permutation() {
        for p in FormParameter::ALL {
            let f = swap_automorphism(&copy(p, 2, 0), &copy(p, 2, 1)).unwrap();
            let expect = IntMatrix::from_i64(4, 4, &[0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0, 0]);
            assert_eq!(f.matrix, expect);
            let f = swap_automorphism(&copy(p, 3, 0), &copy(p, 3, 2)).unwrap();
            let mut expect = IntMatrix::zeros(6, 6);
            for (r, c) in [(4, 0), (5, 1), (2, 2), (3, 3), (0, 4), (1, 5)] {
                expect[(r, c)] = BigInt::from(1);
            }
            assert_eq!(f.matrix, expect);
        }
    }

    #[test]
    fn swap_with_sheared_copy() {
        let p = FormParameter::SKEW_EVEN;
        let m = hyp(p, 2);
        let h0 = copy(p, 2, 0);
        // e ↦ e₂, f ↦ f₂ + 2e₂.
        let h1 = QModMorphism::new(hyp(p, 1), m.clone(), IntMatrix::from_i64(4, 2, &[0, 0, 0, 0, 1, 2, 0, 1])).unwrap();
        let f = swap_automorphism(&h0, &h1).unwrap();
        assert!(f.is_isomorphism());
        assert_eq!(f.matrix.mul(&h0.matrix), h1.matrix);
        // f∘f is the identity on h0(H) ⊕ h1(H).
        let ff = f.matrix.mul(&f.matrix);
        assert_eq!(ff.mul(&h0.matrix.hstack(&h1.matrix)), h0.matrix.hstack(&h1.matrix));
        assert!(swap_automorphism(&h0, &h0).is_err());
    }

    #[test]
    fn transitivity_examples() {
        let p = FormParameter::SKEW_ALL;
        let m = hyp(p, 2);
        let k = build_ka(&m, 1).unwrap();
        let w = k.transitivity_witness(&copy(p, 2, 0), &copy(p, 2, 0)).unwrap().unwrap();
        assert!(w.automorphism.matrix.is_identity());
        let w = k.transitivity_witness(&copy(p, 2, 0), &copy(p, 2, 1)).unwrap().unwrap();
        assert_eq!(w.path.len(), 2);
        assert_eq!(w.automorphism.matrix.mul(&copy(p, 2, 0).matrix), copy(p, 2, 1).matrix);
    }

    #[test]
    fn shortest_paths_are_shortest() {
        let k = build_ka(&hyp(FormParameter::SKEW_EVEN, 3), 1).unwrap();
        let n = k.vertex_count();
        let from = 0;
        // Oracle: plain BFS distances from `from`.
        let mut dist = vec![usize::MAX; n];
        dist[from] = 0;
        let mut q = VecDeque::from([from]);
        while let Some(v) = q.pop_front() {
            for u in k.neighbors(v) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    q.push_back(u);
                }
            }
        }
        for to in (0..n).step_by(n / 37 + 1) {
            match k.shortest_path(from, to) {
                Some(p) => {
                    assert_eq!(p.len() - 1, dist[to]);
                    assert!(p.windows(2).all(|w| k.adjacent(w[0], w[1])));
                }
                None => assert_eq!(dist[to], usize::MAX),
            }
        }
    }

    #[test]
    fn cancellation_examples() {
        let p = FormParameter::SKEW_EVEN;
        let m = hyp(p, 1);
        let mh = hyp(p, 2);
        let w = cancellation_witness(&m, &m, &QModMorphism::identity(&mh), 1).unwrap().unwrap();
        assert!(w.isomorphism.matrix.is_identity());
        // Rank zero: any automorphism of H.
        let z = QuadraticModule::zero(p);
        let rot = QModMorphism::new(hyp(p, 1), hyp(p, 1), IntMatrix::from_i64(2, 2, &[0, -1, 1, 0])).unwrap();
        let w = cancellation_witness(&z, &z, &rot, 1).unwrap().unwrap();
        assert_eq!(w.isomorphism.matrix.shape(), (0, 0));
        // N is H in the basis (e, f + 2e); φ = (B⁻¹ ⊕ 1) composed with the block swap.
        let b = IntMatrix::from_i64(2, 2, &[1, 2, 0, 1]);
        let n = m.restrict(&b).unwrap();
        let b_inv = b.unimodular_inverse().unwrap();
        let swap = swap_automorphism(&copy(p, 2, 0), &copy(p, 2, 1)).unwrap();
        let phi_m = b_inv.block_diag(&IntMatrix::identity(2)).mul(&swap.matrix);
        let phi = QModMorphism::new(mh.clone(), n.direct_sum(&hyp(p, 1)).unwrap(), phi_m).unwrap();
        let w = cancellation_witness(&m, &n, &phi, 2).unwrap().unwrap();
        assert!(w.isomorphism.is_isomorphism());
        assert_eq!(w.isomorphism.matrix.mul(&w.isomorphism.inverse().unwrap().matrix), IntMatrix::identity(2));
    }

    #[test]
    fn prop43_examples() {
        let p = FormParameter::SKEW_EVEN;
        let m = hyp(p, 4);
        let h0 = copy(p, 4, 0);
        let path = prop43_connect(&copy(p, 4, 1), &h0, 1).unwrap().unwrap();
        assert_eq!(path.len(), 2);
        // h = copy 1 after a cross move touching copies 1 and 2: e ↦ e₁, f ↦ f₁ + e₂.
        let h = QModMorphism::new(hyp(p, 1), m.clone(), IntMatrix::from_i64(8, 2, &[1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0])).unwrap();
        let path = prop43_connect(&h, &h0, 1).unwrap().unwrap();
        assert_eq!(path.len(), 3);
        let mid = &path[1].matrix;
        assert!(mid.row_range(0, 4).is_zero(), "middle vertex lives in copies 3 and 4");
        // H²: the complement of h0 is too small.
        let m2 = hyp(p, 2);
        let h = QModMorphism::new(hyp(p, 1), m2, IntMatrix::from_i64(4, 2, &[1, 0, 0, 1, 0, 1, 0, 0])).unwrap();
        assert!(prop43_connect(&h, &copy(p, 2, 0), 1).is_err());
    }

    #[test]
    fn monotone_in_the_bound() {
        for p in FormParameter::ALL {
            let m = hyp(p, 2);
            let (k1, k2) = (build_ka(&m, 1).unwrap(), build_ka(&m, 2).unwrap());
            assert!(k2.vertex_count() > k1.vertex_count());
            for i in 0..k1.vertex_count() {
                let j = k2.index_of(&k1.matrix(i)).expect("bound-1 vertex persists");
                for i2 in k1.neighbors(i) {
                    assert!(k2.adjacent(j, k2.index_of(&k1.matrix(i2)).unwrap()));
                }
            }
        }
    }

    #[test]
    fn inclusion_into_a_stabilization_is_an_embedding() {
        for p in FormParameter::ALL {
            let m = hyp(p, 2);
            let big = m.direct_sum(&hyp(p, 1)).unwrap();
            let (k, kb) = (build_ka(&m, 1).unwrap(), build_ka(&big, 1).unwrap());
            let pad = |i: usize| k.matrix(i).vstack(&IntMatrix::zeros(2, 2));
            let image: Vec<usize> = (0..k.vertex_count()).map(|i| kb.index_of(&pad(i)).unwrap()).collect();
            for i in 0..k.vertex_count() {
                for j in 0..k.vertex_count() {
                    assert_eq!(k.adjacent(i, j), kb.adjacent(image[i], image[j]));
                }
            }
        }
    }

    #[test]
    fn hub_pass_agrees_with_exhaustive_components() {
        let k = build_ka(&hyp(FormParameter::SKEW_ALL, 3), 1).unwrap();
        let exact = k.components();
        let mut uf = k.hub_unions();
        let hubs = summarize(&mut uf, ComponentMethod::Hubs);
        assert!(hubs.count >= exact.count);
        if hubs.count == 1 {
            assert_eq!(exact.count, 1);
        }
    }
}
