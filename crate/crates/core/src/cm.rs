//! Connectivity certificates, (locally) weakly Cohen–Macaulay checks and the
//! full-subcomplex connectivity harness.
//!
//! Connectivity is certified at the level of reduced integral homology, plus
//! a trivial edge-path group for `n ≥ 1`. A `false` certificate means "not
//! shown", not "disproved".

use serde::{Deserialize, Serialize};

use crate::chain::{ChainComplex, HomologyGroup, SparseMatrix};
use crate::pi1::pi1_trivial;
use crate::simplicial::{Face, SimplicialComplex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub n: i64,
    pub nonempty: bool,
    /// Largest `k ≤ n` with `H̃_j = 0` for all `j ≤ k`; `-2` for the empty
    /// complex.
    pub h_reduced_vanishing_up_to: i64,
    /// Only computed for `n ≥ 1` on connected complexes.
    pub pi1_trivial: Option<bool>,
    /// `X` is shown to be `n`-connected.
    pub certified: bool,
}

pub fn connectivity_report(x: &SimplicialComplex, n: i64, pi1_budget: usize) -> ConnectivityReport {
    let nonempty = !x.is_empty();
    let mut vanishing = if nonempty { -1 } else { -2 };
    if nonempty && n >= 0 {
        let h = x.homology(n as usize);
        for k in 0..=n {
            if !h.reduced(k).is_zero() {
                break;
            }
            vanishing = k;
        }
    }
    let pi1 = if n >= 1 && vanishing >= 0 { pi1_trivial(x, pi1_budget) } else { None };
    let certified = match n {
        n if n <= -2 => true,
        -1 => nonempty,
        n => vanishing >= n && (n < 1 || pi1 == Some(true)),
    };
    ConnectivityReport { n, nonempty, h_reduced_vanishing_up_to: vanishing.min(n), pi1_trivial: pi1, certified }
}

/// Result of a Cohen–Macaulay check. On failure `witness` is the first face
/// whose link (or, for the empty face, the complex itself) is not certified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmReport {
    pub n: i64,
    pub holds: bool,
    pub witness: Option<Face>,
}

fn cm_check(x: &SimplicialComplex, n: i64, pi1_budget: usize, global: bool) -> CmReport {
    let fail = |w: Face| CmReport { n, holds: false, witness: Some(w) };
    if global && !connectivity_report(x, n - 1, pi1_budget).certified {
        return fail(Vec::new());
    }
    // p-faces with n - p - 2 <= -2 impose nothing.
    let top = (n - 1).min(x.dim());
    for p in 0..=top.max(-1) {
        for sigma in x.faces(p as usize) {
            let link = x.link(&sigma).expect("face of x");
            if !connectivity_report(&link, n - p - 2, pi1_budget).certified {
                return fail(sigma);
            }
        }
    }
    CmReport { n, holds: true, witness: None }
}

/// `wCM(X) ≥ n`.
pub fn is_wcm(x: &SimplicialComplex, n: i64, pi1_budget: usize) -> CmReport {
    cm_check(x, n, pi1_budget, true)
}

/// `lCM(X) ≥ n`.
pub fn is_lcm(x: &SimplicialComplex, n: i64, pi1_budget: usize) -> CmReport {
    cm_check(x, n, pi1_budget, false)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop25Report {
    pub n: i64,
    pub hypothesis_holds: bool,
    /// First face outside `Y` whose link meets `Y` in a complex that is not
    /// certified.
    pub hypothesis_witness: Option<Face>,
    /// `H_k(X, Y) = 0` for all `k ≤ n`.
    pub conclusion_holds: bool,
    pub relative_homology: Vec<HomologyGroup>,
}

/// Relative chain complex `C(X)/C(Y)` in degrees `0..=top`.
pub fn relative_chain_complex(x: &SimplicialComplex, y: &SimplicialComplex, top: usize) -> ChainComplex {
    let faces: Vec<Vec<Face>> = (0..=top).map(|k| x.faces(k).into_iter().filter(|f| !y.contains_face(f)).collect()).collect();
    let index: Vec<std::collections::HashMap<&Face, usize>> = faces.iter().map(|fs| fs.iter().enumerate().map(|(i, f)| (f, i)).collect()).collect();
    let mut boundaries = vec![SparseMatrix::zeros(0, faces[0].len())];
    for k in 1..=top {
        let mut m = SparseMatrix::zeros(faces[k - 1].len(), 0);
        for f in &faces[k] {
            m.push_column((0..f.len()).filter_map(|i| {
                let mut g = f.clone();
                g.remove(i);
                index[k - 1].get(&g).map(|&r| (r, if i % 2 == 0 { 1 } else { -1 }))
            }));
        }
        boundaries.push(m);
    }
    ChainComplex::new(faces.iter().map(Vec::len).collect(), boundaries, false)
}

/// Checks the hypothesis and the homological conclusion for the inclusion
/// of the full subcomplex on `y_vertices`.
pub fn prop25_harness(x: &SimplicialComplex, y_vertices: &[usize], n: i64, pi1_budget: usize) -> Prop25Report {
    let y = x.full_subcomplex(y_vertices);
    let in_y = |v: &usize| y_vertices.contains(v);
    let mut witness = None;
    'faces: for p in 0..=x.dim() {
        if n - p - 1 <= -2 {
            break;
        }
        for sigma in x.faces(p as usize) {
            if sigma.iter().any(in_y) {
                continue;
            }
            let link = x.link(&sigma).expect("face of x");
            let meet = link.full_subcomplex(y_vertices);
            if !connectivity_report(&meet, n - p - 1, pi1_budget).certified {
                witness = Some(sigma);
                break 'faces;
            }
        }
    }
    let relative_homology = if n >= 0 { relative_chain_complex(x, &y, n as usize + 1).homology(n as usize).unreduced } else { Vec::new() };
    let conclusion_holds = relative_homology.iter().all(HomologyGroup::is_zero);
    Prop25Report { n, hypothesis_holds: witness.is_none(), hypothesis_witness: witness, conclusion_holds, relative_homology }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pi1::DEFAULT_PI1_BUDGET as B;

    fn cx(n: usize, facets: &[&[usize]]) -> SimplicialComplex {
        SimplicialComplex::new(n, facets.iter().map(|f| f.to_vec()).collect()).unwrap()
    }

    fn two_triangles() -> SimplicialComplex {
        cx(6, &[&[0, 1, 2], &[3, 4, 5]])
    }

    #[test]
    fn connectivity_examples() {
        let r = connectivity_report(&SimplicialComplex::boundary_of_simplex(3), 1, B);
        assert!(r.nonempty && r.certified);
        assert_eq!((r.h_reduced_vanishing_up_to, r.pi1_trivial), (1, Some(true)));
        let r = connectivity_report(&cx(2, &[&[0], &[1]]), 0, B);
        assert_eq!(r.h_reduced_vanishing_up_to, -1);
        assert!(!r.certified);
        let r = connectivity_report(&SimplicialComplex::empty(0), -1, B);
        assert!(!r.nonempty && !r.certified);
        assert!(connectivity_report(&SimplicialComplex::empty(0), -2, B).certified);
        // RP²: H̃₁ = ℤ/2, so not 1-connected.
        let r = connectivity_report(&crate::simplicial::projective_plane_6(), 1, B);
        assert_eq!((r.h_reduced_vanishing_up_to, r.certified), (0, false));
    }

    #[test]
    fn wcm_examples() {
        assert!(is_wcm(&SimplicialComplex::boundary_of_simplex(3), 2, B).holds);
        assert!(is_wcm(&SimplicialComplex::simplex(1), 1, B).holds);
        let r = is_wcm(&two_triangles(), 1, B);
        assert_eq!((r.holds, r.witness), (false, Some(vec![])));
    }

    #[test]
    fn lcm_examples() {
        assert!(is_lcm(&two_triangles(), 1, B).holds);
        assert!(is_lcm(&SimplicialComplex::boundary_of_simplex(3), 2, B).holds);
        let path = cx(3, &[&[0, 1], &[1, 2]]);
        let r = is_lcm(&path, 2, B);
        assert_eq!((r.holds, r.witness), (false, Some(vec![1])));
    }

    #[test]
    fn prop25_examples() {
        let s = SimplicialComplex::boundary_of_simplex(3);
        let r = prop25_harness(&s, &[0, 1, 2, 3], 0, B);
        assert!(r.hypothesis_holds && r.conclusion_holds);
        let r = prop25_harness(&s, &[0, 1, 2], 0, B);
        assert!(r.hypothesis_holds && r.conclusion_holds);
        let r = prop25_harness(&two_triangles(), &[0, 1, 2], 0, B);
        assert!(!r.hypothesis_holds);
        assert_eq!(r.hypothesis_witness, Some(vec![3]));
        assert!(!r.conclusion_holds);
    }
}
