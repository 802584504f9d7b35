//! Bounded exhaustive search for form-preserving maps.
//!
//! A map `S → T` is searched column by column: column `j` is the image of
//! the `j`-th basis vector of `S` and must satisfy `λ_T(cᵢ, cⱼ) = λ_S(bᵢ, bⱼ)`
//! for `i ≤ j` and `μ_T(cⱼ) = μ_S(bⱼ)`. Candidates are all vectors of the
//! box `[−B, B]^rank(T)` in lexicographic order with the first coordinate
//! most significant and entries running from `+B` down to `−B`, so results
//! come out in that order of the column sequence. Running entries downward
//! puts the standard embeddings (entries 1 and 0) ahead of their negatives.
//!
//! Arithmetic runs on `i64` when the box and the Gram entries are small
//! enough that no intermediate can overflow, and on `BigInt` otherwise.

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::form::LambdaSub;
use crate::matrix::IntMatrix;
use crate::quadratic::{IntVector, QuadraticModule};

/// Upper limit on the number of box vectors scanned per search.
pub const MAX_BOX_VECTORS: u64 = 20_000_000;

pub(crate) trait Scalar: Clone + PartialEq + Send + Sync + std::fmt::Debug {
    fn from_big(v: &BigInt) -> Self;
    fn to_big(&self) -> BigInt;
    fn from_i64(v: i64) -> Self;
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_even(&self) -> bool;
    /// `self += a * b`
    fn mul_add(&mut self, a: &Self, b: &Self);
    fn sub(&self, other: &Self) -> Self;
}

impl Scalar for i64 {
    fn from_big(v: &BigInt) -> Self {
        v.to_i64().expect("value checked to fit")
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_even(&self) -> bool {
        *self & 1 == 0
    }
    fn mul_add(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

impl Scalar for BigInt {
    fn from_big(v: &BigInt) -> Self {
        v.clone()
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn is_zero(&self) -> bool {
        <BigInt as Zero>::is_zero(self)
    }
    fn is_even(&self) -> bool {
        Integer::is_even(self)
    }
    fn mul_add(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

/// The form of a target module in scalar type `T`.
#[derive(Clone, Debug)]
pub(crate) struct FormData<T> {
    pub n: usize,
    pub gram: Vec<T>,
    pub mu: Vec<T>,
    pub lambda: LambdaSub,
}

impl<T: Scalar> FormData<T> {
    pub fn new(m: &QuadraticModule) -> Self {
        let n = m.rank();
        let gram = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| T::from_big(&m.gram()[(i, j)])).collect();
        let mu = m.mu_basis().iter().map(|v| T::from_big(&v.representative())).collect();
        Self { n, gram, mu, lambda: m.param().lambda() }
    }

    /// `xᵀ G` as a row.
    pub fn left_row(&self, x: &[T]) -> Vec<T> {
        let mut row = vec![T::zero(); self.n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, r) in row.iter_mut().enumerate() {
                r.mul_add(xi, &self.gram[i * self.n + j]);
            }
        }
        row
    }

    /// `G x` as a column.
    pub fn right_col(&self, x: &[T]) -> Vec<T> {
        let mut col = vec![T::zero(); self.n];
        for (i, c) in col.iter_mut().enumerate() {
            for (j, xj) in x.iter().enumerate() {
                if !xj.is_zero() {
                    c.mul_add(&self.gram[i * self.n + j], xj);
                }
            }
        }
        col
    }

    pub fn lambda(&self, x: &[T], y: &[T]) -> T {
        dot(&self.left_row(x), y)
    }

    /// Unreduced closed form of `μ`.
    pub fn mu_raw(&self, x: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            if x[i].is_zero() {
                continue;
            }
            let mut sq = T::zero();
            sq.mul_add(&x[i], &x[i]);
            acc.mul_add(&sq, &self.mu[i]);
            for j in i + 1..self.n {
                if !x[j].is_zero() {
                    let mut p = T::zero();
                    p.mul_add(&x[i], &x[j]);
                    acc.mul_add(&p, &self.gram[i * self.n + j]);
                }
            }
        }
        acc
    }

    pub fn congruent(&self, a: &T, b: &T) -> bool {
        match self.lambda {
            LambdaSub::Zero => a == b,
            LambdaSub::Even => a.sub(b).is_even(),
            LambdaSub::All => true,
        }
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc.mul_add(x, y);
        }
    }
    acc
}

/// Whether all arithmetic on vectors with entries in `[−bound, bound]`
/// fits comfortably in `i64`, and the source requirements are `i64` values.
fn fits_i64(spec: &ColumnSpec, target: &QuadraticModule, bound: u32) -> bool {
    let n = target.rank() as u128;
    let gmax = target.gram().max_abs();
    let mumax = target.mu_basis().iter().map(|v| v.abs_representative()).max().unwrap_or_default();
    let Some(g) = (gmax + mumax).to_u128() else { return false };
    let b = bound as u128;
    let target_ok = n
        .checked_mul(n)
        .and_then(|x| x.checked_mul(b * b + 1))
        .and_then(|x| x.checked_mul(g + 1))
        .is_some_and(|x| x < (1u128 << 60));
    let limit = BigInt::from(1i64 << 60);
    target_ok && spec.gram.entries().iter().chain(&spec.mu).all(|v| v.abs() < limit)
}

/// Required values for each column of a map out of a source module.
#[derive(Clone, Debug)]
pub(crate) struct ColumnSpec {
    /// `k × k` Gram matrix of the source.
    pub gram: IntMatrix,
    /// Unreduced `μ` representatives on the source basis.
    pub mu: Vec<BigInt>,
}

impl ColumnSpec {
    pub fn from_module(source: &QuadraticModule) -> Self {
        Self { gram: source.gram().clone(), mu: source.mu_basis().iter().map(|m| m.representative()).collect() }
    }

    fn k(&self) -> usize {
        self.gram.rows()
    }
}

pub(crate) fn box_size(n: usize, bound: u32) -> Option<u64> {
    (2 * bound as u64 + 1).checked_pow(n as u32)
}

/// All vectors of `[−bound, bound]^n`, lexicographically with entries
/// descending.
pub(crate) fn box_vectors<T: Scalar>(n: usize, bound: u32) -> Result<Vec<Vec<T>>> {
    let size = box_size(n, bound).filter(|&s| s <= MAX_BOX_VECTORS).ok_or_else(|| Error::ResourceLimit(format!("box [-{bound},{bound}]^{n} is too large to enumerate")))?;
    let b = bound as i64;
    let mut out = Vec::with_capacity(size as usize);
    let mut cur = vec![b; n];
    loop {
        out.push(cur.iter().map(|&x| T::from_i64(x)).collect());
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if cur[i] > -b {
                cur[i] -= 1;
                for c in cur.iter_mut().skip(i + 1) {
                    *c = b;
                }
                break;
            }
        }
    }
}

/// Candidate lists per column together with precomputed data for the DFS.
struct Prepared<T> {
    form: FormData<T>,
    vectors: Vec<Vec<T>>,
    /// Per column: indices into `vectors` meeting the diagonal and μ constraints.
    per_column: Vec<Vec<u32>>,
    required: Vec<Vec<T>>,
}

fn prepare<T: Scalar>(spec: &ColumnSpec, target: &QuadraticModule, bound: u32) -> Result<Prepared<T>> {
    let form = FormData::<T>::new(target);
    let k = spec.k();
    let required: Vec<Vec<T>> = (0..k).map(|i| (0..k).map(|j| T::from_big(&spec.gram[(i, j)])).collect()).collect();
    if k == 0 {
        return Ok(Prepared { form, vectors: Vec::new(), per_column: Vec::new(), required });
    }
    let all = box_vectors::<T>(target.rank(), bound)?;
    let req_mu: Vec<T> = spec.mu.iter().map(T::from_big).collect();
    // Distinct (diagonal, mu) requirements share a candidate scan.
    let mut keys: Vec<(T, T)> = Vec::new();
    let mut col_key = Vec::with_capacity(k);
    for j in 0..k {
        let key = (required[j][j].clone(), req_mu[j].clone());
        let pos = keys.iter().position(|x| *x == key).unwrap_or_else(|| {
            keys.push(key);
            keys.len() - 1
        });
        col_key.push(pos);
    }
    let mut keep = vec![false; all.len()];
    let lists: Vec<Vec<u32>> = keys
        .iter()
        .map(|(diag, mu)| {
            all.par_iter()
                .enumerate()
                .filter(|(_, v)| form.lambda(v, v) == *diag && form.congruent(&form.mu_raw(v), mu))
                .map(|(i, _)| i as u32)
                .collect()
        })
        .collect();
    for l in &lists {
        for &i in l {
            keep[i as usize] = true;
        }
    }
    // Compact the vector table to the vectors that can appear at all.
    let mut remap = vec![u32::MAX; all.len()];
    let mut vectors = Vec::new();
    for (i, v) in all.into_iter().enumerate() {
        if keep[i] {
            remap[i] = vectors.len() as u32;
            vectors.push(v);
        }
    }
    let lists: Vec<Vec<u32>> = lists.into_iter().map(|l| l.into_iter().map(|i| remap[i as usize]).collect()).collect();
    let per_column = col_key.into_iter().map(|p| lists[p].clone()).collect();
    Ok(Prepared { form, vectors, per_column, required })
}

impl<T: Scalar> Prepared<T> {
    /// Depth-first search from a fixed prefix; `visit` returns `Break` to stop.
    fn dfs(&self, chosen: &mut Vec<u32>, rows: &mut Vec<(Vec<T>, Vec<T>)>, visit: &mut dyn FnMut(&[u32]) -> ControlFlow<()>) -> ControlFlow<()> {
        let j = chosen.len();
        if j == self.per_column.len() {
            return visit(chosen);
        }
        for &cand in &self.per_column[j] {
            let v = &self.vectors[cand as usize];
            let ok = rows.iter().enumerate().all(|(i, (left, right))| dot(left, v) == self.required[i][j] && dot(v, right) == self.required[j][i]);
            if !ok {
                continue;
            }
            chosen.push(cand);
            rows.push((self.form.left_row(v), self.form.right_col(v)));
            let flow = self.dfs(chosen, rows, visit);
            chosen.pop();
            rows.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn to_matrix(&self, idx: &[u32]) -> IntMatrix {
        let cols: Vec<IntVector> = idx.iter().map(|&i| self.vectors[i as usize].iter().map(Scalar::to_big).collect()).collect();
        IntMatrix::from_columns(self.form.n, &cols)
    }

    fn collect_all(&self) -> Vec<Vec<u32>> {
        if self.per_column.is_empty() {
            return vec![Vec::new()];
        }
        self.per_column[0]
            .par_iter()
            .map(|&first| {
                let mut out = Vec::new();
                let v = &self.vectors[first as usize];
                let mut chosen = vec![first];
                let mut rows = vec![(self.form.left_row(v), self.form.right_col(v))];
                let _ = self.dfs(&mut chosen, &mut rows, &mut |c| {
                    out.push(c.to_vec());
                    ControlFlow::Continue(())
                });
                out
            })
            .flatten()
            .collect()
    }
}

/// Runs `visit` on each map in lexicographic order until it returns `true`.
pub(crate) fn search_columns(spec: &ColumnSpec, target: &QuadraticModule, bound: u32, visit: &mut dyn FnMut(&IntMatrix) -> bool) -> Result<()> {
    fn run<T: Scalar>(spec: &ColumnSpec, target: &QuadraticModule, bound: u32, visit: &mut dyn FnMut(&IntMatrix) -> bool) -> Result<()> {
        let p = prepare::<T>(spec, target, bound)?;
        let _ = p.dfs(&mut Vec::new(), &mut Vec::new(), &mut |idx| if visit(&p.to_matrix(idx)) { ControlFlow::Break(()) } else { ControlFlow::Continue(()) });
        Ok(())
    }
    if fits_i64(spec, target, bound) {
        run::<i64>(spec, target, bound, visit)
    } else {
        run::<BigInt>(spec, target, bound, visit)
    }
}

/// First morphism `source → target` in lexicographic order.
pub(crate) fn first_morphism(source: &QuadraticModule, target: &QuadraticModule, bound: u32) -> Result<Option<IntMatrix>> {
    let mut found = None;
    search_columns(&ColumnSpec::from_module(source), target, bound, &mut |m| {
        found = Some(m.clone());
        true
    })?;
    Ok(found)
}

/// All morphisms `source → target` with entries in the box, lexicographically.
pub(crate) fn all_morphisms(source: &QuadraticModule, target: &QuadraticModule, bound: u32) -> Result<Vec<IntMatrix>> {
    let spec = ColumnSpec::from_module(source);
    fn run<T: Scalar>(spec: &ColumnSpec, target: &QuadraticModule, bound: u32) -> Result<Vec<IntMatrix>> {
        let p = prepare::<T>(spec, target, bound)?;
        Ok(p.collect_all().iter().map(|idx| p.to_matrix(idx)).collect())
    }
    if fits_i64(&spec, target, bound) {
        run::<i64>(&spec, target, bound)
    } else {
        run::<BigInt>(&spec, target, bound)
    }
}

/// Morphisms `source → target` as column-index tuples into a shared table of
/// vectors; used where materializing every matrix would be too costly.
pub(crate) struct IndexedMorphisms {
    pub table: Vec<IntVector>,
    pub tuples: Vec<Vec<u32>>,
}

pub(crate) fn indexed_morphisms(source: &QuadraticModule, target: &QuadraticModule, bound: u32) -> Result<IndexedMorphisms> {
    let spec = ColumnSpec::from_module(source);
    fn run<T: Scalar>(spec: &ColumnSpec, target: &QuadraticModule, bound: u32) -> Result<IndexedMorphisms> {
        let p = prepare::<T>(spec, target, bound)?;
        let tuples = p.collect_all();
        let table = p.vectors.iter().map(|v| v.iter().map(Scalar::to_big).collect()).collect();
        Ok(IndexedMorphisms { table, tuples })
    }
    if fits_i64(&spec, target, bound) {
        run::<i64>(&spec, target, bound)
    } else {
        run::<BigInt>(&spec, target, bound)
    }
}
