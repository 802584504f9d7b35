//! Edge-path group presentations and bounded Tietze simplification.

use std::collections::{BTreeMap, VecDeque};

use crate::matrix::IntMatrix;
use crate::simplicial::SimplicialComplex;

/// Default cap on Tietze moves.
pub const DEFAULT_PI1_BUDGET: usize = 10_000;

/// Relators longer than this abort the simplification.
const MAX_RELATOR_LEN: usize = 50_000;

/// A finite presentation. Letters are `±(g + 1)` for generator `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: usize,
    pub relators: Vec<Vec<i32>>,
}

/// Outcome of the simplification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi1Outcome {
    /// `Some(true)` trivial, `Some(false)` provably nontrivial, `None` unknown.
    pub trivial: Option<bool>,
    pub moves: usize,
    pub final_presentation: Presentation,
}

/// Edge-path group of a connected complex relative to a BFS spanning tree
/// rooted at the smallest vertex. `None` for empty or disconnected input.
pub fn edge_path_presentation(x: &SimplicialComplex) -> Option<Presentation> {
    let vertices = x.vertices();
    let &root = vertices.first()?;
    let edges = x.edges();
    let mut adj: BTreeMap<usize, Vec<usize>> = vertices.iter().map(|&v| (v, Vec::new())).collect();
    for &(a, b) in &edges {
        adj.get_mut(&a).expect("vertex").push(b);
        adj.get_mut(&b).expect("vertex").push(a);
    }
    let mut seen = BTreeMap::from([(root, ())]);
    let mut tree = std::collections::BTreeSet::new();
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &u in &adj[&v] {
            if seen.insert(u, ()).is_none() {
                tree.insert((v.min(u), v.max(u)));
                queue.push_back(u);
            }
        }
    }
    if seen.len() != vertices.len() {
        return None;
    }
    let mut gen_of = BTreeMap::new();
    for e in &edges {
        if !tree.contains(e) {
            let g = gen_of.len() as i32 + 1;
            gen_of.insert(*e, g);
        }
    }
    let letter = |a: usize, b: usize| -> Option<i32> { gen_of.get(&(a, b)).copied() };
    let mut relators = Vec::new();
    for t in x.faces(2) {
        let (a, b, c) = (t[0], t[1], t[2]);
        // [ab][bc][ac]^{-1}
        let word: Vec<i32> = [letter(a, b), letter(b, c), letter(a, c).map(|g| -g)].into_iter().flatten().collect();
        relators.push(word);
    }
    Some(Presentation { generators: gen_of.len(), relators })
}

fn reduce(word: &mut Vec<i32>) {
    let mut out: Vec<i32> = Vec::with_capacity(word.len());
    for &l in word.iter() {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    // Cyclic reduction.
    let mut s = 0;
    while out.len() >= 2 * s + 2 && out[s] == -out[out.len() - 1 - s] {
        s += 1;
    }
    *word = out[s..out.len() - s].to_vec();
}

fn invert(word: &[i32]) -> Vec<i32> {
    word.iter().rev().map(|l| -l).collect()
}

/// Simplifies with at most `budget` moves (one per generator elimination
/// and one per rewritten relator), then decides triviality where possible.
pub fn simplify(p: &Presentation, budget: usize) -> Pi1Outcome {
    let mut rels: Vec<Vec<i32>> = p.relators.clone();
    let mut alive: Vec<bool> = vec![true; p.generators];
    let mut moves = 0;
    loop {
        for r in rels.iter_mut() {
            reduce(r);
        }
        rels.retain(|r| !r.is_empty());
        rels.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        rels.dedup();
        // Shortest relator with a generator occurring exactly once.
        let mut pick = None;
        'outer: for (ri, r) in rels.iter().enumerate() {
            let mut count: BTreeMap<i32, usize> = BTreeMap::new();
            for &l in r {
                *count.entry(l.abs()).or_default() += 1;
            }
            for (pos, &l) in r.iter().enumerate() {
                if count[&l.abs()] == 1 {
                    pick = Some((ri, pos));
                    break 'outer;
                }
            }
        }
        let Some((ri, pos)) = pick else { break };
        if moves >= budget {
            break;
        }
        let r = rels.remove(ri);
        let l = r[pos];
        // Rotate so that l is first: l·w = 1, hence l = w^{-1}.
        let w: Vec<i32> = r[pos + 1..].iter().chain(&r[..pos]).copied().collect();
        let g = l.abs();
        let image = if l > 0 { invert(&w) } else { w };
        let image_inv = invert(&image);
        alive[(g - 1) as usize] = false;
        moves += 1;
        let mut too_long = false;
        for rel in rels.iter_mut() {
            if !rel.iter().any(|x| x.abs() == g) {
                continue;
            }
            let mut out = Vec::new();
            for &x in rel.iter() {
                if x == g {
                    out.extend_from_slice(&image);
                } else if x == -g {
                    out.extend_from_slice(&image_inv);
                } else {
                    out.push(x);
                }
            }
            *rel = out;
            moves += 1;
            too_long |= rel.len() > MAX_RELATOR_LEN;
        }
        if too_long || moves > budget {
            break;
        }
    }
    for r in rels.iter_mut() {
        reduce(r);
    }
    rels.retain(|r| !r.is_empty());
    let live: Vec<usize> = (0..p.generators).filter(|&g| alive[g]).collect();
    let trivial = if live.is_empty() {
        Some(true)
    } else if rels.is_empty() {
        Some(false)
    } else if abelianization_nontrivial(&live, &rels) {
        Some(false)
    } else {
        None
    };
    let renumber: BTreeMap<i32, i32> = live.iter().enumerate().map(|(i, &g)| (g as i32 + 1, i as i32 + 1)).collect();
    let relators = rels.iter().map(|r| r.iter().map(|&l| l.signum() * renumber[&l.abs()]).collect()).collect();
    Pi1Outcome { trivial, moves, final_presentation: Presentation { generators: live.len(), relators } }
}

/// Exponent-sum matrix has rank below the generator count or a nontrivial
/// invariant factor.
fn abelianization_nontrivial(live: &[usize], rels: &[Vec<i32>]) -> bool {
    let pos: BTreeMap<i32, usize> = live.iter().enumerate().map(|(i, &g)| (g as i32 + 1, i)).collect();
    let mut m = IntMatrix::zeros(rels.len(), live.len());
    for (i, r) in rels.iter().enumerate() {
        for &l in r {
            m[(i, pos[&l.abs()])] += l.signum();
        }
    }
    let f = m.invariant_factors();
    f.len() < live.len() || f.iter().any(|d| d.magnitude() != &1u32.into())
}

/// `Some(true)` if `π₁` is shown trivial, `Some(false)` if shown
/// nontrivial, `None` if undecided or `x` is empty or disconnected.
pub fn pi1_trivial(x: &SimplicialComplex, budget: usize) -> Option<bool> {
    edge_path_presentation(x).and_then(|p| simplify(&p, budget).trivial)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(n: usize, facets: &[&[usize]]) -> SimplicialComplex {
        SimplicialComplex::new(n, facets.iter().map(|f| f.to_vec()).collect()).unwrap()
    }

    #[test]
    fn spheres_and_circles() {
        assert_eq!(pi1_trivial(&SimplicialComplex::boundary_of_simplex(3), DEFAULT_PI1_BUDGET), Some(true));
        assert_eq!(pi1_trivial(&SimplicialComplex::boundary_of_simplex(2), DEFAULT_PI1_BUDGET), Some(false));
        assert_eq!(pi1_trivial(&SimplicialComplex::simplex(4), DEFAULT_PI1_BUDGET), Some(true));
        assert_eq!(pi1_trivial(&crate::simplicial::projective_plane_6(), DEFAULT_PI1_BUDGET), Some(false));
        assert_eq!(pi1_trivial(&cx(2, &[&[0], &[1]]), DEFAULT_PI1_BUDGET), None);
    }

    #[test]
    fn zero_budget_is_unknown() {
        assert_eq!(pi1_trivial(&SimplicialComplex::boundary_of_simplex(3), 0), None);
    }

    #[test]
    fn presentation_of_triangle_boundary() {
        let p = edge_path_presentation(&SimplicialComplex::boundary_of_simplex(2)).unwrap();
        assert_eq!(p.generators, 1);
        assert!(p.relators.is_empty());
    }

    #[test]
    fn reduction_is_cyclic() {
        let mut w = vec![1, 2, -2, 3, -1];
        reduce(&mut w);
        assert_eq!(w, vec![3]);
    }
}
