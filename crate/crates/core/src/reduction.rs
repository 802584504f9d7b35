//! Orbits of unimodular vectors in `H^{n+1}` under elementary automorphisms.
//!
//! [`reduce_to_first_block`] moves any unimodular vector of `H^{n+1}` (skew
//! form parameters) into `H ⊕ 0` by an explicit word of moves: each block is
//! first brought to `(a, 0)` or `(a, a)` by rotations and shears, then block 0
//! is paired with every other block in turn and that block is cleared by a
//! cross move followed by the three-step composite. [`orbit_search`] is an
//! independent breadth-first search over the same move set and also covers
//! the symmetric case, where no reduction algorithm is provided.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::form::FormParameter;
use crate::matrix::IntMatrix;
use crate::quadratic::{IntVector, QModMorphism, QuadraticModule};

/// A vector `(a₀, b₀, …, aₙ, bₙ)` of `H^{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HVector {
    param: FormParameter,
    coords: IntVector,
}

impl HVector {
    pub fn new(param: FormParameter, coords: IntVector) -> Result<Self> {
        if coords.is_empty() || coords.len() % 2 != 0 {
            return input(format!("H-vector length must be positive and even, got {}", coords.len()));
        }
        Ok(Self { param, coords })
    }

    pub fn from_i64(param: FormParameter, coords: &[i64]) -> Result<Self> {
        Self::new(param, coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn param(&self) -> FormParameter {
        self.param
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn blocks(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn gcd(&self) -> BigInt {
        self.coords.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    pub fn is_unimodular(&self) -> bool {
        self.gcd().is_one()
    }

    /// All coordinates outside block 0 vanish.
    pub fn in_first_block(&self) -> bool {
        self.coords[2..].iter().all(Zero::is_zero)
    }

    /// The module `H^{n+1}` this vector lives in.
    pub fn ambient(&self) -> QuadraticModule {
        QuadraticModule::hyperbolic(self.param, self.blocks())
    }
}

impl fmt::Display for HVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `v = d · v′` with `d` the gcd of the coordinates and `v′` unimodular.
pub fn primitive_part(v: &HVector) -> Result<(BigInt, HVector)> {
    let d = v.gcd();
    if d.is_zero() {
        return input("primitive part of the zero vector");
    }
    let coords = v.coords.iter().map(|c| c / &d).collect();
    Ok((d, HVector { param: v.param, coords }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShearDir {
    /// `(a, b) ↦ (a − 2b, b)`
    Fwd,
    /// `(a, b) ↦ (a + 2b, b)`
    Inv,
}

/// An elementary automorphism of `H^{n+1}`, acting on one block or on an
/// ordered pair of blocks `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "lowercase")]
pub enum ElementaryMove {
    /// `(a, b) ↦ sign·(b, −a)`; skew parameters only.
    Rot { block: usize, sign: i8 },
    /// `(a, b) ↦ (a ∓ 2b, b)`; skew parameters only.
    Shear { block: usize, dir: ShearDir },
    /// `(a, b, c, d) ↦ (a, b + c, c, d + a)` (or its inverse); skew only.
    Cross { blocks: [usize; 2], inverse: bool },
    /// `(a,b,c,d) ↦ (a,b+d,c−a,d) ↦ (a,b+d,d,a−c) ↦ (a,(b+d)+t(a−c),d−ta,a−c)`
    /// with the last step's multiplier `t` fixed when the move is recorded.
    Final { blocks: [usize; 2], scale: i64, inverse: bool },
    /// Exchanges two blocks; valid for every form parameter.
    Swap { blocks: [usize; 2] },
    /// `(a, b, c, d) ↦ (a + s·c, b, c, d − s·b)`; valid for every parameter.
    Eichler { blocks: [usize; 2], sign: i8 },
    /// `(a, b) ↦ (b, a)`; symmetric parameter only.
    Flip { block: usize },
    /// `(a, b) ↦ (−a, −b)`.
    Negate { block: usize },
}

impl ElementaryMove {
    fn blocks_touched(&self) -> Vec<usize> {
        use ElementaryMove::*;
        match *self {
            Rot { block, .. } | Shear { block, .. } | Flip { block } | Negate { block } => vec![block],
            Cross { blocks, .. } | Final { blocks, .. } | Swap { blocks } | Eichler { blocks, .. } => blocks.to_vec(),
        }
    }

    /// Form parameters for which this move is an automorphism of `H^{n+1}`.
    pub fn valid_for(&self, param: FormParameter) -> bool {
        use ElementaryMove::*;
        match self {
            Rot { .. } | Shear { .. } | Cross { .. } | Final { .. } => param.is_skew(),
            Flip { .. } => !param.is_skew(),
            Swap { .. } | Eichler { .. } | Negate { .. } => true,
        }
    }

    /// The move on the coordinates of the blocks it touches (2×2 or 4×4).
    pub fn local_matrix(&self) -> IntMatrix {
        use ElementaryMove::*;
        let m = |r, c, e: &[i64]| IntMatrix::from_i64(r, c, e);
        match *self {
            Rot { sign, .. } => {
                let s = sign as i64;
                m(2, 2, &[0, s, -s, 0])
            }
            Shear { dir: ShearDir::Fwd, .. } => m(2, 2, &[1, -2, 0, 1]),
            Shear { dir: ShearDir::Inv, .. } => m(2, 2, &[1, 2, 0, 1]),
            Cross { inverse, .. } => {
                let s = if inverse { -1 } else { 1 };
                m(4, 4, &[1, 0, 0, 0, 0, 1, s, 0, 0, 0, 1, 0, s, 0, 0, 1])
            }
            Final { scale, inverse, .. } => {
                // (a,b,c,d) -> (a, b+d, c-a, d)
                let step1 = m(4, 4, &[1, 0, 0, 0, 0, 1, 0, 1, -1, 0, 1, 0, 0, 0, 0, 1]);
                // (C, D) -> (D, -C)
                let step2 = m(4, 4, &[1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0]);
                // (A,B,C,D) -> (A, B + tD, C - tA, D)
                let t = scale;
                let step3 = m(4, 4, &[1, 0, 0, 0, 0, 1, 0, t, -t, 0, 1, 0, 0, 0, 0, 1]);
                let fwd = step3.mul(&step2).mul(&step1);
                if inverse {
                    fwd.unimodular_inverse().expect("composite of automorphisms")
                } else {
                    fwd
                }
            }
            Swap { .. } => m(4, 4, &[0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0, 0]),
            Eichler { sign, .. } => {
                let s = sign as i64;
                m(4, 4, &[1, 0, s, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, -s, 0, 1])
            }
            Flip { .. } => m(2, 2, &[0, 1, 1, 0]),
            Negate { .. } => m(2, 2, &[-1, 0, 0, -1]),
        }
    }

    fn check(&self, blocks: usize) -> Result<()> {
        let touched = self.blocks_touched();
        if let Some(&b) = touched.iter().find(|&&b| b >= blocks) {
            return input(format!("move {self} uses block {b} of a vector with {blocks} blocks"));
        }
        if touched.len() == 2 && touched[0] == touched[1] {
            return input(format!("move {self} needs two distinct blocks"));
        }
        if let ElementaryMove::Rot { sign, .. } | ElementaryMove::Eichler { sign, .. } = self {
            if sign.abs() != 1 {
                return input("move sign must be +1 or -1");
            }
        }
        Ok(())
    }

    /// The full `2(n+1) × 2(n+1)` matrix of the move.
    pub fn matrix(&self, blocks: usize) -> Result<IntMatrix> {
        self.check(blocks)?;
        let coords: Vec<usize> = self.blocks_touched().iter().flat_map(|&b| [2 * b, 2 * b + 1]).collect();
        let local = self.local_matrix();
        let mut full = IntMatrix::identity(2 * blocks);
        for &c in &coords {
            full[(c, c)] = BigInt::zero();
        }
        for (li, &gi) in coords.iter().enumerate() {
            for (lj, &gj) in coords.iter().enumerate() {
                full[(gi, gj)] = local[(li, lj)].clone();
            }
        }
        Ok(full)
    }

    pub fn inverse(&self) -> ElementaryMove {
        use ElementaryMove::*;
        match *self {
            Rot { block, sign } => Rot { block, sign: -sign },
            Shear { block, dir } => Shear { block, dir: if dir == ShearDir::Fwd { ShearDir::Inv } else { ShearDir::Fwd } },
            Cross { blocks, inverse } => Cross { blocks, inverse: !inverse },
            Final { blocks, scale, inverse } => Final { blocks, scale, inverse: !inverse },
            Eichler { blocks, sign } => Eichler { blocks, sign: -sign },
            other @ (Swap { .. } | Flip { .. } | Negate { .. }) => other,
        }
    }

    /// Applies the move to a vector. Fails on out-of-range blocks and on moves
    /// that are not automorphisms for the vector's form parameter.
    pub fn apply(&self, v: &HVector) -> Result<HVector> {
        self.check(v.blocks())?;
        if !self.valid_for(v.param) {
            return Err(Error::Unsupported(format!("move {self} is not an automorphism for {}", v.param)));
        }
        let mut out = v.clone();
        self.apply_in_place(&mut out.coords);
        Ok(out)
    }

    fn apply_in_place(&self, coords: &mut [BigInt]) {
        let idx: Vec<usize> = self.blocks_touched().iter().flat_map(|&b| [2 * b, 2 * b + 1]).collect();
        let local = self.local_matrix();
        let old: Vec<BigInt> = idx.iter().map(|&i| coords[i].clone()).collect();
        for (li, &gi) in idx.iter().enumerate() {
            let mut acc = BigInt::zero();
            for (lj, x) in old.iter().enumerate() {
                if !x.is_zero() {
                    acc += &local[(li, lj)] * x;
                }
            }
            coords[gi] = acc;
        }
    }

    /// The moves [`orbit_search`] explores, in its fixed enumeration order.
    pub fn generators(param: FormParameter, blocks: usize) -> Vec<ElementaryMove> {
        use ElementaryMove::*;
        let mut out = Vec::new();
        let pairs: Vec<[usize; 2]> = (0..blocks).flat_map(|i| (0..blocks).filter(move |&j| j != i).map(move |j| [i, j])).collect();
        if param.is_skew() {
            for block in 0..blocks {
                out.push(Rot { block, sign: 1 });
                out.push(Rot { block, sign: -1 });
                out.push(Shear { block, dir: ShearDir::Fwd });
                out.push(Shear { block, dir: ShearDir::Inv });
            }
            for &blocks in &pairs {
                out.push(Cross { blocks, inverse: false });
                out.push(Cross { blocks, inverse: true });
            }
        } else {
            for block in 0..blocks {
                out.push(Flip { block });
                out.push(Negate { block });
            }
            for &blocks in &pairs {
                out.push(Eichler { blocks, sign: 1 });
                out.push(Eichler { blocks, sign: -1 });
            }
        }
        for &[i, j] in &pairs {
            if i < j {
                out.push(Swap { blocks: [i, j] });
            }
        }
        out
    }
}

impl fmt::Display for ElementaryMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ElementaryMove::*;
        match self {
            Rot { block, sign } => write!(f, "rot[{block}]{}", if *sign > 0 { "+" } else { "-" }),
            Shear { block, dir } => write!(f, "shear[{block}]{}", if *dir == ShearDir::Fwd { "" } else { "^-1" }),
            Cross { blocks, inverse } => write!(f, "cross[{},{}]{}", blocks[0], blocks[1], if *inverse { "^-1" } else { "" }),
            Final { blocks, scale, inverse } => write!(f, "final[{},{};{scale}]{}", blocks[0], blocks[1], if *inverse { "^-1" } else { "" }),
            Swap { blocks } => write!(f, "swap[{},{}]", blocks[0], blocks[1]),
            Eichler { blocks, sign } => write!(f, "eichler[{},{}]{}", blocks[0], blocks[1], if *sign > 0 { "+" } else { "-" }),
            Flip { block } => write!(f, "flip[{block}]"),
            Negate { block } => write!(f, "neg[{block}]"),
        }
    }
}

/// Applies `word` left to right.
pub fn replay(word: &[ElementaryMove], v: &HVector) -> Result<HVector> {
    word.iter().try_fold(v.clone(), |acc, m| m.apply(&acc))
}

/// The automorphism realized by `word` (later moves on the left).
pub fn word_matrix(word: &[ElementaryMove], blocks: usize) -> Result<IntMatrix> {
    word.iter().try_fold(IntMatrix::identity(2 * blocks), |acc, m| Ok(m.matrix(blocks)?.mul(&acc)))
}

/// The inverse word: inverse moves in reverse order.
pub fn inverse_word(word: &[ElementaryMove]) -> Vec<ElementaryMove> {
    word.iter().rev().map(ElementaryMove::inverse).collect()
}

/// A word reducing a vector into `H ⊕ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub word: Vec<ElementaryMove>,
    pub result: HVector,
}

struct Reducer {
    coords: IntVector,
    word: Vec<ElementaryMove>,
}

impl Reducer {
    fn push(&mut self, m: ElementaryMove) {
        m.apply_in_place(&mut self.coords);
        self.word.push(m);
    }

    fn block(&self, i: usize) -> (BigInt, BigInt) {
        (self.coords[2 * i].clone(), self.coords[2 * i + 1].clone())
    }

    fn negate(&mut self, block: usize) {
        self.push(ElementaryMove::Rot { block, sign: 1 });
        self.push(ElementaryMove::Rot { block, sign: 1 });
    }

    /// Brings block `i` to `(a, 0)` or `(a, a)` with `a ≥ 0`, descending on
    /// `max(|a|, |b|)`.
    fn normalize_block(&mut self, i: usize) {
        let potential = |a: &BigInt, b: &BigInt| a.abs().max(b.abs());
        loop {
            let (a, b) = self.block(i);
            if b.is_zero() {
                if a.is_negative() {
                    self.negate(i);
                }
                return;
            }
            if a == b && a.is_positive() {
                return;
            }
            if b.abs() >= a.abs() {
                // (b, -a): the new second coordinate is the smaller one; for
                // |a| = |b| this lands on ±(c, c).
                self.push(ElementaryMove::Rot { block: i, sign: 1 });
                let (a2, b2) = self.block(i);
                if a2 == b2 && a2.is_negative() {
                    self.negate(i);
                }
                continue;
            }
            if b.is_negative() {
                self.negate(i);
            }
            let (a, b) = self.block(i);
            let before = potential(&a, &b);
            let dir = if a.is_positive() { ShearDir::Fwd } else { ShearDir::Inv };
            self.push(ElementaryMove::Shear { block: i, dir });
            let (a2, b2) = self.block(i);
            assert!(potential(&a2, &b2) < before, "shear failed to decrease max(|a|,|b|)");
        }
    }

    /// Clears block `q` into block `p` (`p ≠ q`).
    fn clear_block(&mut self, p: usize, q: usize) {
        let (c, d) = self.block(q);
        if c.is_zero() && d.is_zero() {
            return;
        }
        self.normalize_block(p);
        self.normalize_block(q);
        self.push(ElementaryMove::Cross { blocks: [p, q], inverse: false });
        self.normalize_block(p);
        self.normalize_block(q);
        let (a, _) = self.block(p);
        let (c, d) = self.block(q);
        assert!(a == c && a.is_positive(), "pair not normalized to a = c = gcd");
        let scale = (&d / &a).to_i64().expect("scale is 0 or 1");
        self.push(ElementaryMove::Final { blocks: [p, q], scale, inverse: false });
        let (c, d) = self.block(q);
        assert!(c.is_zero() && d.is_zero(), "final composite left block {q} nonzero");
    }
}

/// Reduces a unimodular vector of `H^{n+1}` (skew parameters) into `H ⊕ 0`.
pub fn reduce_to_first_block(v: &HVector) -> Result<Reduction> {
    if !v.is_unimodular() {
        return input(format!("{v} is not unimodular (gcd {})", v.gcd()));
    }
    if !v.param.is_skew() {
        return Err(Error::Unsupported("no reduction algorithm for the symmetric form parameter; use orbit_search".into()));
    }
    let mut r = Reducer { coords: v.coords.clone(), word: Vec::new() };
    for q in 1..v.blocks() {
        r.clear_block(0, q);
    }
    let result = HVector { param: v.param, coords: r.coords };
    debug_assert!(result.in_first_block());
    Ok(Reduction { word: r.word, result })
}

/// Default depth for searches that back the symmetric case.
pub const DEFAULT_SEARCH_DEPTH: usize = 10;

/// Cap on the number of vectors a search may visit.
pub const MAX_SEARCH_STATES: usize = 4_000_000;

/// Breadth-first search for a word of length `≤ depth` from `v` to `w` over
/// [`ElementaryMove::generators`]. The search runs from both ends and
/// returns a shortest word; ties are broken by move enumeration order.
pub fn orbit_search(v: &HVector, w: &HVector, depth: usize) -> Result<Option<Vec<ElementaryMove>>> {
    if v.coords.len() != w.coords.len() || v.param != w.param {
        return input("orbit search between vectors of different shapes or form parameters");
    }
    if v == w {
        return Ok(Some(Vec::new()));
    }
    if v.gcd() != w.gcd() {
        return Ok(None);
    }
    let gens = ElementaryMove::generators(v.param, v.blocks());
    // Parent maps: vector -> (predecessor, move index) in each direction.
    let mut fwd: HashMap<IntVector, Option<(IntVector, usize)>> = HashMap::new();
    let mut bwd: HashMap<IntVector, Option<(IntVector, usize)>> = HashMap::new();
    fwd.insert(v.coords.clone(), None);
    bwd.insert(w.coords.clone(), None);
    let mut fwd_frontier = VecDeque::from([v.coords.clone()]);
    let mut bwd_frontier = VecDeque::from([w.coords.clone()]);
    let (mut fwd_depth, mut bwd_depth) = (0, 0);
    let inverses: Vec<ElementaryMove> = gens.iter().map(ElementaryMove::inverse).collect();
    while fwd_depth + bwd_depth < depth {
        if fwd.len() + bwd.len() > MAX_SEARCH_STATES {
            return Err(Error::ResourceLimit(format!("orbit search exceeded {MAX_SEARCH_STATES} states")));
        }
        let forward = fwd_frontier.len() <= bwd_frontier.len();
        let (frontier, seen, other, moves) = if forward {
            fwd_depth += 1;
            (&mut fwd_frontier, &mut fwd, &bwd, &gens)
        } else {
            bwd_depth += 1;
            (&mut bwd_frontier, &mut bwd, &fwd, &inverses)
        };
        let mut next = VecDeque::new();
        let mut meet: Option<IntVector> = None;
        for x in frontier.drain(..) {
            for (k, m) in moves.iter().enumerate() {
                let mut y = x.clone();
                m.apply_in_place(&mut y);
                if seen.contains_key(&y) {
                    continue;
                }
                seen.insert(y.clone(), Some((x.clone(), k)));
                if meet.is_none() && other.contains_key(&y) {
                    meet = Some(y.clone());
                }
                next.push_back(y);
            }
        }
        *frontier = next;
        if let Some(mid) = meet {
            return Ok(Some(splice(&fwd, &bwd, &gens, &mid)));
        }
        if frontier.is_empty() {
            return Ok(None);
        }
    }
    Ok(None)
}

fn splice(fwd: &HashMap<IntVector, Option<(IntVector, usize)>>, bwd: &HashMap<IntVector, Option<(IntVector, usize)>>, gens: &[ElementaryMove], mid: &IntVector) -> Vec<ElementaryMove> {
    let mut head = Vec::new();
    let mut cur = mid.clone();
    while let Some(Some((prev, k))) = fwd.get(&cur) {
        head.push(gens[*k]);
        cur = prev.clone();
    }
    head.reverse();
    // Backward edges were taken with inverse moves from w's side, so walking
    // back towards w applies the original generator.
    let mut cur = mid.clone();
    while let Some(Some((prev, k))) = bwd.get(&cur) {
        head.push(gens[*k]);
        cur = prev.clone();
    }
    head
}

/// Breadth-first search from `v` to any vector of `H ⊕ 0`.
pub fn search_to_first_block(v: &HVector, depth: usize) -> Result<Option<Reduction>> {
    if v.in_first_block() {
        return Ok(Some(Reduction { word: Vec::new(), result: v.clone() }));
    }
    let gens = ElementaryMove::generators(v.param, v.blocks());
    let mut seen: HashMap<IntVector, Option<(IntVector, usize)>> = HashMap::new();
    seen.insert(v.coords.clone(), None);
    let mut frontier = vec![v.coords.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for x in &frontier {
            for (k, m) in gens.iter().enumerate() {
                let mut y = x.clone();
                m.apply_in_place(&mut y);
                if seen.contains_key(&y) {
                    continue;
                }
                seen.insert(y.clone(), Some((x.clone(), k)));
                if y[2..].iter().all(Zero::is_zero) {
                    let mut word = Vec::new();
                    let mut cur = y.clone();
                    while let Some(Some((prev, k))) = seen.get(&cur) {
                        word.push(gens[*k]);
                        cur = prev.clone();
                    }
                    word.reverse();
                    return Ok(Some(Reduction { word, result: HVector { param: v.param, coords: y } }));
                }
                next.push(y);
            }
        }
        if seen.len() > MAX_SEARCH_STATES {
            return Err(Error::ResourceLimit(format!("orbit search exceeded {MAX_SEARCH_STATES} states")));
        }
        frontier = next;
    }
    Ok(None)
}

/// A morphism `H^{g−1} → ker(ℓ)` obtained from `φ : H^g → M`.
#[derive(Clone, Debug)]
pub struct KernelRestriction {
    /// `ker(ℓ)` with the restricted form, in the coordinates of `kernel_basis`.
    pub kernel: QuadraticModule,
    /// Columns span `ker(ℓ) ⊆ M`.
    pub kernel_basis: IntMatrix,
    /// The restricted morphism into `kernel`.
    pub morphism: QModMorphism,
    /// The same morphism composed with the inclusion `ker(ℓ) → M`.
    pub ambient: QModMorphism,
    /// Word whose automorphism moves `x` (with `ℓ∘φ = λ(x, −)`) into `H ⊕ 0`.
    pub word: Vec<ElementaryMove>,
}

/// Restricts `φ : H^g → M` to `H^{g−1} → ker(ℓ)` after precomposing with an
/// automorphism of `H^g` that moves the vector representing `ℓ∘φ` into the
/// first block.
pub fn kernel_restriction(phi: &QModMorphism, ell: &[BigInt], search_depth: usize) -> Result<KernelRestriction> {
    let param = phi.source.param();
    let g = phi.source.rank() / 2;
    if g == 0 || phi.source != QuadraticModule::hyperbolic(param, g) {
        return input("kernel restriction needs a morphism out of H^g with g >= 1");
    }
    if !phi.is_valid() {
        return input("phi is not a morphism");
    }
    let m = &phi.target;
    if ell.len() != m.rank() {
        return input(format!("functional of length {} on a module of rank {}", ell.len(), m.rank()));
    }
    let ell_row = IntMatrix::from_columns(ell.len(), &[ell.to_vec()]).transpose();
    let r = ell_row.mul(&phi.matrix).row(0);
    // λ(x, y) = r·y for all y: x_e = r_f, x_f = ε r_e on each block.
    let eps = BigInt::from(param.eps());
    let mut x = vec![BigInt::zero(); 2 * g];
    for b in 0..g {
        x[2 * b] = r[2 * b + 1].clone();
        x[2 * b + 1] = &eps * &r[2 * b];
    }
    let (word, keep) = if x.iter().all(Zero::is_zero) {
        (Vec::new(), (0, 2 * (g - 1)))
    } else {
        let hx = HVector::new(param, x)?;
        let (_, prim) = primitive_part(&hx)?;
        let red = if param.is_skew() {
            reduce_to_first_block(&prim)?
        } else {
            search_to_first_block(&prim, search_depth)?.ok_or_else(|| Error::NotFound(format!("no word of length <= {search_depth} moves {prim} into H+0")))?
        };
        (red.word, (2, 2 * g))
    };
    let a = word_matrix(&word, g)?;
    let a_inv = word_matrix(&inverse_word(&word), g)?;
    debug_assert!(a.mul(&a_inv).is_identity());
    let moved = phi.matrix.mul(&a_inv).column_range(keep.0, keep.1);
    if !ell_row.mul(&moved).is_zero() {
        return Err(Error::Unsupported("restricted morphism is not annihilated by ell".into()));
    }
    let source = QuadraticModule::hyperbolic(param, g - 1);
    let ambient = QModMorphism::new(source.clone(), m.clone(), moved.clone())?;
    let ce = ell_row.column_echelon();
    let kernel_basis = ce.transform.column_range(ce.rank, m.rank());
    let kernel = m.restrict(&kernel_basis)?;
    let coords = ce.transform_inv.mul(&moved).row_range(ce.rank, m.rank());
    debug_assert_eq!(kernel_basis.mul(&coords), moved);
    let morphism = QModMorphism::new(source, kernel.clone(), coords)?;
    Ok(KernelRestriction { kernel, kernel_basis, morphism, ambient, word })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SKEW: FormParameter = FormParameter::SKEW_EVEN;

    fn hv(c: &[i64]) -> HVector {
        HVector::from_i64(SKEW, c).unwrap()
    }

    #[test]
    fn primitive_part_examples() {
        let (d, p) = primitive_part(&hv(&[2, 4, 6, 0])).unwrap();
        assert_eq!((d, p), (BigInt::from(2), hv(&[1, 2, 3, 0])));
        let (d, p) = primitive_part(&hv(&[1, 0, 0, 0])).unwrap();
        assert_eq!((d, p), (BigInt::from(1), hv(&[1, 0, 0, 0])));
        let (d, p) = primitive_part(&hv(&[-3, 0, 3, 3])).unwrap();
        assert_eq!((d, p), (BigInt::from(3), hv(&[-1, 0, 1, 1])));
        assert!(primitive_part(&hv(&[0, 0])).is_err());
        assert!(HVector::from_i64(SKEW, &[1, 2, 3]).is_err());
    }

    #[test]
    fn apply_move_examples() {
        let rot = ElementaryMove::Rot { block: 0, sign: 1 };
        assert_eq!(rot.apply(&hv(&[3, 1, 0, 0])).unwrap(), hv(&[1, -3, 0, 0]));
        let shear = ElementaryMove::Shear { block: 0, dir: ShearDir::Fwd };
        assert_eq!(shear.apply(&hv(&[3, 1, 0, 0])).unwrap(), hv(&[1, 1, 0, 0]));
        let cross = ElementaryMove::Cross { blocks: [0, 1], inverse: false };
        assert_eq!(cross.apply(&hv(&[1, 0, 1, 0])).unwrap(), hv(&[1, 1, 1, 1]));
        assert!(ElementaryMove::Rot { block: 2, sign: 1 }.apply(&hv(&[1, 0, 0, 0])).is_err());
        assert!(ElementaryMove::Swap { blocks: [1, 1] }.apply(&hv(&[1, 0, 0, 0])).is_err());
    }

    #[test]
    fn final_composite_matches_step_formula() {
        // (a,b,c,d) -> (a,(b+d)+d(a-c),d-da,a-c) with t = d.
        for (a, b, c, d) in [(1, 0, 1, 0), (1, 1, 1, 1), (1, 0, 1, 1), (2, 3, -1, 4)] {
            let m = ElementaryMove::Final { blocks: [0, 1], scale: d, inverse: false };
            let out = m.apply(&hv(&[a, b, c, d])).unwrap();
            assert_eq!(out, hv(&[a, (b + d) + d * (a - c), d - d * a, a - c]));
        }
    }

    #[test]
    fn moves_are_automorphisms() {
        for param in FormParameter::ALL {
            for blocks in 2..=3 {
                let h = QuadraticModule::hyperbolic(param, blocks);
                let mut all = ElementaryMove::generators(FormParameter::SKEW_EVEN, blocks);
                all.extend(ElementaryMove::generators(FormParameter::SYMMETRIC_EVEN, blocks));
                all.push(ElementaryMove::Final { blocks: [0, 1], scale: 1, inverse: false });
                all.push(ElementaryMove::Final { blocks: [1, 0], scale: 0, inverse: true });
                for m in all {
                    let mat = m.matrix(blocks).unwrap();
                    let iso = h.is_morphism_to(&mat, &h).unwrap() && mat.is_unimodular();
                    assert_eq!(iso, m.valid_for(param), "{m} for {param}");
                    let back = m.inverse().matrix(blocks).unwrap();
                    assert!(mat.mul(&back).is_identity(), "{m}");
                }
            }
        }
    }

    #[test]
    fn reduce_examples() {
        let r = reduce_to_first_block(&hv(&[1, 0, 0, 0])).unwrap();
        assert!(r.word.is_empty());
        assert_eq!(r.result, hv(&[1, 0, 0, 0]));
        for c in [[0, 0, 1, 0], [1, 1, 1, 0], [3, -2, 5, 7], [0, 0, 0, 1]] {
            let v = hv(&c);
            let r = reduce_to_first_block(&v).unwrap();
            assert!(r.result.in_first_block());
            assert_eq!(replay(&r.word, &v).unwrap(), r.result);
        }
        assert!(matches!(reduce_to_first_block(&hv(&[2, 0, 0, 0])), Err(Error::Input(_))));
        let sym = HVector::from_i64(FormParameter::SYMMETRIC_EVEN, &[1, 0, 0, 0]).unwrap();
        assert!(matches!(reduce_to_first_block(&sym), Err(Error::Unsupported(_))));
    }

    #[test]
    fn orbit_search_examples() {
        assert_eq!(orbit_search(&hv(&[1, 0, 0, 0]), &hv(&[1, 0, 0, 0]), 3).unwrap(), Some(vec![]));
        let v = hv(&[0, 0, 1, 0]);
        let w = hv(&[1, 0, 0, 0]);
        let word = orbit_search(&v, &w, 8).unwrap().unwrap();
        assert_eq!(replay(&word, &v).unwrap(), w);
        assert_eq!(orbit_search(&hv(&[2, 0, 0, 0]), &w, 20).unwrap(), None);
        let back = orbit_search(&w, &v, 8).unwrap().unwrap();
        assert_eq!(replay(&back, &w).unwrap(), v);
        assert_eq!(replay(&inverse_word(&word), &w).unwrap(), v);
    }

    #[test]
    fn symmetric_search_reaches_first_block() {
        let v = HVector::from_i64(FormParameter::SYMMETRIC_EVEN, &[1, 1, 1, 0]).unwrap();
        let r = search_to_first_block(&v, 6).unwrap().unwrap();
        assert!(r.result.in_first_block());
        assert_eq!(replay(&r.word, &v).unwrap(), r.result);
    }

    fn identity_on(g: usize) -> QModMorphism {
        QModMorphism::identity(&QuadraticModule::hyperbolic(SKEW, g))
    }

    #[test]
    fn kernel_restriction_examples() {
        let phi = identity_on(2);
        let ell: IntVector = (0..4).map(|j| phi.target.gram().row(0)[j].clone()).collect();
        let kr = kernel_restriction(&phi, &ell, 6).unwrap();
        assert_eq!(kr.ambient.matrix, IntMatrix::from_i64(4, 2, &[0, 0, 0, 0, 1, 0, 0, 1]));
        assert!(kr.morphism.is_valid());

        let zero = vec![BigInt::zero(); 4];
        let kr = kernel_restriction(&phi, &zero, 6).unwrap();
        assert_eq!(kr.ambient.matrix, phi.matrix.column_range(0, 2));

        // ell = λ(e1 + e2, -)
        let h = &phi.target;
        let ell: IntVector = (0..4).map(|j| h.gram()[(0, j)].clone() + h.gram()[(2, j)].clone()).collect();
        let kr = kernel_restriction(&phi, &ell, 6).unwrap();
        assert!(kr.ambient.is_valid());
        let row = IntMatrix::from_columns(4, &[ell.clone()]).transpose();
        assert!(row.mul(&kr.ambient.matrix).is_zero());
        assert_eq!(kr.kernel.rank(), 3);
    }
}
