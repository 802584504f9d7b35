//! Simplicial maps, simplexwise injectivity, bad simplices and relative
//! barycentric subdivision.

use std::collections::BTreeSet;

use crate::error::{input, Result};
use crate::simplicial::{is_subface, normalize_face, subsets_of_size, Face, SimplicialComplex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialMap {
    pub source: SimplicialComplex,
    pub target: SimplicialComplex,
    /// Image label of every source label `0..source.vertex_count()`.
    pub images: Vec<usize>,
}

impl SimplicialMap {
    /// Fails unless the image of every face of `source` is a face of `target`.
    pub fn new(source: SimplicialComplex, target: SimplicialComplex, images: Vec<usize>) -> Result<Self> {
        if images.len() != source.vertex_count() {
            return input(format!("{} images for {} source labels", images.len(), source.vertex_count()));
        }
        let m = Self { source, target, images };
        for f in m.source.facets() {
            let img = m.image(f);
            if !m.target.contains_face(&img) {
                return input(format!("image {img:?} of facet {f:?} is not a face of the target"));
            }
        }
        Ok(m)
    }

    /// Image of a face, deduplicated and sorted.
    pub fn image(&self, face: &[usize]) -> Face {
        let set: BTreeSet<usize> = face.iter().map(|&v| self.images[v]).collect();
        set.into_iter().collect()
    }

    /// (i): every face maps injectively.
    pub fn criterion_faces_injective(&self) -> bool {
        self.source.all_faces().iter().all(|f| self.image(f).len() == f.len())
    }

    /// (ii): `f(Lk σ) ⊆ Lk f(σ)` for every face `σ`.
    pub fn criterion_links(&self) -> bool {
        self.source.all_faces().iter().all(|s| self.link_condition(s))
    }

    /// (iii): `f(Lk v) ⊆ Lk f(v)` for every vertex `v`.
    pub fn criterion_vertex_links(&self) -> bool {
        self.source.vertices().iter().all(|&v| self.link_condition(&[v]))
    }

    fn link_condition(&self, sigma: &[usize]) -> bool {
        let fs = self.image(sigma);
        let link = self.source.link(sigma).expect("face of source");
        link.all_faces().iter().all(|t| {
            let ft = self.image(t);
            let disjoint = ft.iter().all(|v| fs.binary_search(v).is_err());
            let mut union: Face = ft.iter().chain(&fs).copied().collect();
            union.sort_unstable();
            disjoint && self.target.contains_face(&union)
        })
    }

    /// (iv): no edge collapses. This is the test used for simplexwise
    /// injectivity.
    pub fn is_simplexwise_injective(&self) -> bool {
        self.source.edges().iter().all(|&(a, b)| self.images[a] != self.images[b])
    }

    /// Faces containing an edge whose endpoints have equal images, by
    /// decreasing dimension and then lexicographically.
    pub fn find_bad_simplices(&self) -> Vec<Face> {
        let mut bad: Vec<Face> = self.source.all_faces().into_iter().filter(|f| self.image(f).len() < f.len()).collect();
        bad.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        bad
    }
}

/// Output of [`barycentric_subdivide_rel`].
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub complex: SimplicialComplex,
    /// Carrier face in `K` of every vertex label of `complex`.
    pub carriers: Vec<Face>,
    /// For each vertex `v` of the subdivision outside `L`, the closed star of
    /// `v` meets `L` in a single (possibly empty) simplex. Guaranteed when `L`
    /// is a full subcomplex of `K`.
    pub star_meets_l_in_simplex: bool,
}

/// Subdivides `K` relative to `L`: every face not in `L` of dimension ≥ 1
/// gets a barycenter, faces of `L` are kept. Barycenter labels follow the
/// labels of `K`, ordered by dimension and then lexicographically.
pub fn barycentric_subdivide_rel(k: &SimplicialComplex, l: &SimplicialComplex) -> Result<Subdivision> {
    if l.vertex_count() > k.vertex_count() || !l.is_subcomplex_of(k) {
        return input("L is not a subcomplex of K");
    }
    let outside: Vec<Face> = k.all_faces().into_iter().filter(|f| !l.contains_face(f)).collect();
    let mut carriers: Vec<Face> = (0..k.vertex_count()).map(|v| vec![v]).collect();
    let mut label = std::collections::HashMap::new();
    for f in &outside {
        let id = if f.len() == 1 {
            f[0]
        } else {
            carriers.push(f.clone());
            carriers.len() - 1
        };
        label.insert(f.clone(), id);
    }
    let l_faces: Vec<Face> = l.all_faces();
    let mut faces: Vec<Face> = l.facets().to_vec();
    // Saturated chains σ₀ < σ₁ < … up to a facet, all outside L, coned over
    // the maximal L-faces of σ₀.
    fn chains(k: &SimplicialComplex, cur: &Face, out: &mut Vec<Vec<Face>>, prefix: &mut Vec<Face>) {
        prefix.push(cur.clone());
        let ups: Vec<Face> = k.vertices().into_iter().filter(|v| cur.binary_search(v).is_err()).map(|v| normalize_face(&[cur.as_slice(), &[v]].concat()).expect("distinct")).filter(|f| k.contains_face(f)).collect();
        if ups.is_empty() {
            out.push(prefix.clone());
        }
        for u in ups {
            chains(k, &u, out, prefix);
        }
        prefix.pop();
    }
    for s0 in &outside {
        let below: Vec<&Face> = l_faces.iter().filter(|t| is_subface(t, s0)).collect();
        let maximal: Vec<Face> = below.iter().filter(|t| !below.iter().any(|u| u.len() > t.len() && is_subface(t, u))).map(|t| (*t).clone()).collect();
        let taus = if maximal.is_empty() { vec![Vec::new()] } else { maximal };
        let mut all = Vec::new();
        chains(k, s0, &mut all, &mut Vec::new());
        for chain in all {
            let bary: Vec<usize> = chain.iter().map(|f| label[f]).collect();
            for tau in &taus {
                faces.push(tau.iter().chain(&bary).copied().collect());
            }
        }
    }
    let complex = SimplicialComplex::new(carriers.len(), faces)?;
    let star_ok = complex.vertices().into_iter().filter(|&v| !l.contains_face(&[v])).all(|v| star_meets_in_simplex(&complex, l, v));
    Ok(Subdivision { complex, carriers, star_meets_l_in_simplex: star_ok })
}

fn star_meets_in_simplex(x: &SimplicialComplex, l: &SimplicialComplex, v: usize) -> bool {
    let star = x.closed_star(v);
    let mut meet: BTreeSet<Face> = BTreeSet::new();
    for f in star.facets() {
        let inside: Face = f.iter().copied().filter(|&u| u < l.vertex_count() && l.contains_face(&[u])).collect();
        for size in 1..=inside.len() {
            for s in subsets_of_size(&inside, size) {
                if l.contains_face(&s) {
                    meet.insert(s);
                }
            }
        }
    }
    let union: Face = meet.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    union.is_empty() || (meet.contains(&union) && star.contains_face(&union))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cx(n: usize, facets: &[&[usize]]) -> SimplicialComplex {
        SimplicialComplex::new(n, facets.iter().map(|f| f.to_vec()).collect()).unwrap()
    }

    #[test]
    fn injectivity_examples() {
        let tri = SimplicialComplex::simplex(2);
        let id = SimplicialMap::new(tri.clone(), tri.clone(), vec![0, 1, 2]).unwrap();
        assert!(id.is_simplexwise_injective());
        let edge = SimplicialComplex::simplex(1);
        let point = SimplicialComplex::simplex(0);
        let c = SimplicialMap::new(edge, point, vec![0, 0]).unwrap();
        assert!(!c.is_simplexwise_injective());
        // 4-cycle folded onto one edge: 0,2 -> 0 and 1,3 -> 1.
        let c4 = cx(4, &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]);
        let fold = SimplicialMap::new(c4, SimplicialComplex::simplex(1), vec![0, 1, 0, 1]).unwrap();
        assert!(fold.is_simplexwise_injective());
        assert!(fold.criterion_faces_injective() && fold.criterion_links() && fold.criterion_vertex_links());
        assert!(SimplicialMap::new(SimplicialComplex::simplex(1), cx(2, &[&[0], &[1]]), vec![0, 1]).is_err());
    }

    #[test]
    fn bad_simplex_examples() {
        let tri = SimplicialComplex::simplex(2);
        assert!(SimplicialMap::new(tri.clone(), tri.clone(), vec![0, 1, 2]).unwrap().find_bad_simplices().is_empty());
        let edge = SimplicialMap::new(SimplicialComplex::simplex(1), SimplicialComplex::simplex(0), vec![0, 0]).unwrap();
        assert_eq!(edge.find_bad_simplices(), vec![vec![0, 1]]);
        let squash = SimplicialMap::new(tri, SimplicialComplex::simplex(1), vec![0, 0, 1]).unwrap();
        assert_eq!(squash.find_bad_simplices(), vec![vec![0, 1, 2], vec![0, 1]]);
    }

    #[test]
    fn subdivision_examples() {
        let k = SimplicialComplex::simplex(2);
        let s = barycentric_subdivide_rel(&k, &k).unwrap();
        assert_eq!(s.complex, k);
        let edge = SimplicialComplex::simplex(1);
        let ends = cx(2, &[&[0], &[1]]);
        let s = barycentric_subdivide_rel(&edge, &ends).unwrap();
        assert_eq!(s.complex.facets(), &[vec![0, 2], vec![1, 2]]);
        assert_eq!(s.carriers[2], vec![0, 1]);
        let s = barycentric_subdivide_rel(&k, &SimplicialComplex::boundary_of_simplex(2)).unwrap();
        assert_eq!(s.complex.facets(), &[vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]);
        // ∂Δ² is not full in Δ²: the barycenter's star meets it in a circle.
        assert!(!s.star_meets_l_in_simplex);
        assert!(barycentric_subdivide_rel(&edge, &SimplicialComplex::simplex(2)).is_err());
    }

    #[test]
    fn subdivision_of_non_full_subcomplex() {
        // L = two edges of a triangle is not full; the barycenter's star meets
        // L in a path, not a simplex.
        let k = SimplicialComplex::simplex(2);
        let l = cx(3, &[&[0, 1], &[1, 2]]);
        let s = barycentric_subdivide_rel(&k, &l).unwrap();
        assert!(!s.star_meets_l_in_simplex);
        assert_eq!(s.complex.homology(2).unreduced, k.homology(2).unreduced);
    }

    fn random_map() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, usize, Vec<(usize, usize)>, Vec<usize>)> {
        (2usize..=8, 2usize..=8).prop_flat_map(|(n, m)| {
            let pn: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            let pm: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
            (Just(n), proptest::sample::subsequence(pn.clone(), 0..=pn.len()), Just(m), proptest::sample::subsequence(pm.clone(), 0..=pm.len()), proptest::collection::vec(0..m, n))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn four_criteria_agree((n, es, m, et, images) in random_map()) {
            let source = SimplicialComplex::flag(n, &es).unwrap();
            // Target: flag complex containing every image edge, plus the given ones.
            let mut edges: BTreeSet<(usize, usize)> = et.into_iter().collect();
            for &(a, b) in &es {
                let (x, y) = (images[a].min(images[b]), images[a].max(images[b]));
                if x != y {
                    edges.insert((x, y));
                }
            }
            let target = SimplicialComplex::flag(m, &edges.into_iter().collect::<Vec<_>>()).unwrap();
            let Ok(f) = SimplicialMap::new(source, target, images) else { return Ok(()) };
            let iv = f.is_simplexwise_injective();
            prop_assert_eq!(f.criterion_faces_injective(), iv);
            prop_assert_eq!(f.criterion_links(), iv);
            prop_assert_eq!(f.criterion_vertex_links(), iv);
            prop_assert_eq!(f.find_bad_simplices().is_empty(), iv);
        }

        #[test]
        fn full_subcomplex_subdivision_has_star_property((n, es, _m, _et, pick) in random_map()) {
            let k = SimplicialComplex::flag(n.min(6), &es.into_iter().filter(|&(a, b)| a < 6 && b < 6).collect::<Vec<_>>()).unwrap();
            let verts: Vec<usize> = k.vertices().into_iter().filter(|v| pick.get(*v).is_some_and(|p| p % 2 == 0)).collect();
            let l = k.full_subcomplex(&verts);
            let s = barycentric_subdivide_rel(&k, &l).unwrap();
            prop_assert!(s.star_meets_l_in_simplex);
            prop_assert_eq!(s.complex.homology(2).unreduced, k.homology(2).unreduced);
        }
    }
}
