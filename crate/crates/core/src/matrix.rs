//! Dense integer matrices over arbitrary-precision integers, with the
//! unimodular reductions the rest of the crate leans on: column echelon form
//! (kernels of integer maps), inverses of unimodular matrices, determinants
//! and Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Row-major dense matrix of `BigInt`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self[(r, c)])?;
            }
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have the same length.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows.iter().flat_map(|row| row.iter().cloned().map(Into::into)).collect();
        Self { rows: r, cols: c, data }
    }

    /// Builds a matrix whose columns are the given vectors, with `rows` rows.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Self { rows, cols, data: entries.iter().map(|&v| BigInt::from(v)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> Vec<BigInt> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (k, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        acc += &self[(i, k)] * x;
                    }
                }
                acc
            })
            .collect()
    }

    /// Columns `start..end` as a new matrix.
    pub fn column_range(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.cols);
        let mut m = Self::zeros(self.rows, end - start);
        for r in 0..self.rows {
            for c in start..end {
                m[(r, c - start)] = self[(r, c)].clone();
            }
        }
        m
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_range(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.rows);
        Self { rows: end - start, cols: self.cols, data: self.data[start * self.cols..end * self.cols].to_vec() }
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m[(r, c)] = self[(r, c)].clone();
            }
            for c in 0..other.cols {
                m[(r, self.cols + c)] = other[(r, c)].clone();
            }
        }
        m
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn block_diag(&self, other: &IntMatrix) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m[(r, c)] = self[(r, c)].clone();
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                m[(self.rows + r, self.cols + c)] = other[(r, c)].clone();
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (0..self.cols).all(|c| self[(r, c)] == if r == c { BigInt::one() } else { BigInt::zero() }))
    }

    /// Largest absolute value of an entry (zero for an empty matrix).
    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_default()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = &self.data[src * self.cols + c] * k;
            self.data[dst * self.cols + c] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = &self.data[r * self.cols + src] * k;
            self.data[r * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = std::mem::take(&mut self.data[r * self.cols + c]);
            self.data[r * self.cols + c] = -v;
        }
    }

    fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = std::mem::take(&mut self.data[r * self.cols + c]);
            self.data[r * self.cols + c] = -v;
        }
    }

    /// Replaces columns (p, q) by (s·p + t·q, x·p + y·q).
    fn combine_cols(&mut self, p: usize, q: usize, s: &BigInt, t: &BigInt, x: &BigInt, y: &BigInt) {
        for r in 0..self.rows {
            let a = self.data[r * self.cols + p].clone();
            let b = self.data[r * self.cols + q].clone();
            self.data[r * self.cols + p] = s * &a + t * &b;
            self.data[r * self.cols + q] = x * &a + y * &b;
        }
    }

    /// Replaces rows (p, q) by (s·p + t·q, x·p + y·q).
    fn combine_rows(&mut self, p: usize, q: usize, s: &BigInt, t: &BigInt, x: &BigInt, y: &BigInt) {
        for c in 0..self.cols {
            let a = self.data[p * self.cols + c].clone();
            let b = self.data[q * self.cols + c].clone();
            self.data[p * self.cols + c] = s * &a + t * &b;
            self.data[q * self.cols + c] = x * &a + y * &b;
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&r| !m[(r, k)].is_zero()) {
                    Some(r) => {
                        m.swap_rows(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                    m[(i, j)] = v / &prev;
                }
            }
            prev = m[(k, k)].clone();
        }
        sign * &m[(n - 1, n - 1)]
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det().abs().is_one()
    }

    /// Inverse of a unimodular matrix, or `None` when the matrix is not
    /// invertible over the integers.
    pub fn unimodular_inverse(&self) -> Option<IntMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        // Row-reduce [A | I] with unimodular row operations.
        let mut a = self.clone();
        let mut inv = IntMatrix::identity(n);
        for col in 0..n {
            // Euclid down the column until a single nonzero remains at `col`.
            loop {
                let pivot = (col..n).filter(|&r| !a[(r, col)].is_zero()).min_by(|&x, &y| a[(x, col)].abs().cmp(&a[(y, col)].abs()))?;
                a.swap_rows(col, pivot);
                inv.swap_rows(col, pivot);
                let mut done = true;
                for r in col + 1..n {
                    if a[(r, col)].is_zero() {
                        continue;
                    }
                    let q = a[(r, col)].div_floor(&a[(col, col)]);
                    let nq = -q;
                    a.add_row_multiple(r, col, &nq);
                    inv.add_row_multiple(r, col, &nq);
                    if !a[(r, col)].is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if !a[(col, col)].abs().is_one() {
                return None;
            }
            if a[(col, col)].is_negative() {
                a.negate_row(col);
                inv.negate_row(col);
            }
        }
        for col in (0..n).rev() {
            for r in 0..col {
                let k = -a[(r, col)].clone();
                a.add_row_multiple(r, col, &k);
                inv.add_row_multiple(r, col, &k);
            }
        }
        Some(inv)
    }

    /// Column echelon form by unimodular column operations.
    pub fn column_echelon(&self) -> ColumnEchelon {
        let (rows, cols) = self.shape();
        let mut h = self.clone();
        let mut u = IntMatrix::identity(cols);
        let mut u_inv = IntMatrix::identity(cols);
        let mut pivot_col = 0;
        let mut pivots = Vec::new();
        for r in 0..rows {
            if pivot_col == cols {
                break;
            }
            // Fold every entry of row r in columns > pivot_col into pivot_col.
            for c in pivot_col + 1..cols {
                if h[(r, c)].is_zero() {
                    continue;
                }
                let a = h[(r, pivot_col)].clone();
                let b = h[(r, c)].clone();
                let eg = a.extended_gcd(&b);
                let (g, s, t) = (eg.gcd, eg.x, eg.y);
                let (ag, bg) = (&a / &g, &b / &g);
                // E = [[s, -b/g], [t, a/g]] on columns (pivot_col, c); det E = 1.
                let nbg = -&bg;
                h.combine_cols(pivot_col, c, &s, &t, &nbg, &ag);
                u.combine_cols(pivot_col, c, &s, &t, &nbg, &ag);
                // E^{-1} = [[a/g, b/g], [-t, s]] acting on rows of U^{-1}.
                let nt = -&t;
                u_inv.combine_rows(pivot_col, c, &ag, &bg, &nt, &s);
            }
            if h[(r, pivot_col)].is_zero() {
                continue;
            }
            if h[(r, pivot_col)].is_negative() {
                h.negate_col(pivot_col);
                u.negate_col(pivot_col);
                u_inv.negate_row(pivot_col);
            }
            // Reduce earlier pivot columns modulo this one in row r.
            for &(_, pc) in &pivots {
                let q = h[(r, pc)].div_floor(&h[(r, pivot_col)]);
                if !q.is_zero() {
                    let nq = -&q;
                    h.add_col_multiple(pc, pivot_col, &nq);
                    u.add_col_multiple(pc, pivot_col, &nq);
                    // (I - q e_pivot e_pc^T)^{-1} = I + q ..., acting on rows.
                    u_inv.add_row_multiple(pivot_col, pc, &q);
                }
            }
            pivots.push((r, pivot_col));
            pivot_col += 1;
        }
        ColumnEchelon { echelon: h, transform: u, transform_inv: u_inv, rank: pivot_col }
    }

    /// Basis of the integer kernel `{x : A x = 0}` as the columns of the
    /// returned matrix. The kernel is saturated: it is a direct summand.
    pub fn kernel_basis(&self) -> IntMatrix {
        let ce = self.column_echelon();
        ce.transform.column_range(ce.rank, self.cols)
    }

    /// Smith normal form with the transforms: `diag = left * self * right`.
    pub fn smith(&self) -> Smith {
        smith_impl(self, true)
    }

    /// Invariant factors only (the nonzero diagonal of the Smith form).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        smith_impl(self, false).diagonal()
    }

    pub fn rank(&self) -> usize {
        self.column_echelon().rank
    }

    /// Replaces `col` by `col - round(<col, other>/<other, other>) * other`
    /// pairwise until no change, shrinking entries of a lattice basis. The
    /// transform is unimodular; returns the reduced basis.
    pub fn size_reduce_columns(&self) -> IntMatrix {
        let mut m = self.clone();
        let n = m.cols;
        let dot = |m: &IntMatrix, a: usize, b: usize| -> BigInt {
            (0..m.rows).map(|r| &m[(r, a)] * &m[(r, b)]).sum()
        };
        let mut changed = true;
        let mut rounds = 0;
        while changed && rounds < 64 {
            changed = false;
            rounds += 1;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let nj = dot(&m, j, j);
                    if nj.is_zero() {
                        continue;
                    }
                    let d = dot(&m, i, j);
                    // q = round(d / nj)
                    let q: BigInt = (&d * BigInt::from(2) + &nj).div_floor(&(&nj * BigInt::from(2)));
                    if !q.is_zero() {
                        let before = dot(&m, i, i);
                        let nq = -&q;
                        m.add_col_multiple(i, j, &nq);
                        if dot(&m, i, i) < before {
                            changed = true;
                        } else {
                            m.add_col_multiple(i, j, &q);
                        }
                    }
                }
            }
        }
        m
    }
}

/// Result of [`IntMatrix::column_echelon`]: `self * transform = echelon`,
/// with the first `rank` columns of `echelon` carrying the pivots and the
/// remaining columns zero.
#[derive(Clone, Debug)]
pub struct ColumnEchelon {
    pub echelon: IntMatrix,
    pub transform: IntMatrix,
    pub transform_inv: IntMatrix,
    pub rank: usize,
}

/// Smith normal form `diag = left * a * right` with `left`, `right`
/// unimodular and the diagonal forming a divisibility chain.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: IntMatrix,
    pub left: Option<IntMatrix>,
    pub right: Option<IntMatrix>,
    pub rank: usize,
}

impl Smith {
    /// Nonzero diagonal entries, in order.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.diag[(i, i)].clone()).collect()
    }

    /// Checks `diag = left * a * right`, unimodularity and divisibility.
    pub fn verify(&self, a: &IntMatrix) -> bool {
        let (Some(l), Some(r)) = (&self.left, &self.right) else { return false };
        if l.mul(a).mul(r) != self.diag || !l.is_unimodular() || !r.is_unimodular() {
            return false;
        }
        let (rows, cols) = self.diag.shape();
        for i in 0..rows {
            for j in 0..cols {
                if i != j && !self.diag[(i, j)].is_zero() {
                    return false;
                }
            }
        }
        let d = self.diagonal();
        d.iter().all(|x| x.is_positive()) && d.windows(2).all(|w| (&w[1] % &w[0]).is_zero())
    }
}

fn smith_impl(a: &IntMatrix, track: bool) -> Smith {
    let (rows, cols) = a.shape();
    let mut d = a.clone();
    let mut left = track.then(|| IntMatrix::identity(rows));
    let mut right = track.then(|| IntMatrix::identity(cols));
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: entry of minimal absolute value in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                let v = &d[(r, c)];
                if v.is_zero() {
                    continue;
                }
                if best.map_or(true, |(br, bc)| v.abs() < d[(br, bc)].abs()) {
                    best = Some((r, c));
                    if v.abs().is_one() {
                        break;
                    }
                }
            }
            if best.is_some_and(|(br, bc)| d[(br, bc)].abs().is_one()) {
                break;
            }
        }
        let Some((pr, pc)) = best else { break };
        d.swap_rows(t, pr);
        d.swap_cols(t, pc);
        if let Some(l) = left.as_mut() {
            l.swap_rows(t, pr);
        }
        if let Some(r) = right.as_mut() {
            r.swap_cols(t, pc);
        }
        loop {
            let mut clean = true;
            for r in t + 1..rows {
                if d[(r, t)].is_zero() {
                    continue;
                }
                let q = d[(r, t)].div_floor(&d[(t, t)]);
                let nq = -q;
                d.add_row_multiple(r, t, &nq);
                if let Some(l) = left.as_mut() {
                    l.add_row_multiple(r, t, &nq);
                }
                if !d[(r, t)].is_zero() {
                    clean = false;
                }
            }
            for c in t + 1..cols {
                if d[(t, c)].is_zero() {
                    continue;
                }
                let q = d[(t, c)].div_floor(&d[(t, t)]);
                let nq = -q;
                d.add_col_multiple(c, t, &nq);
                if let Some(r) = right.as_mut() {
                    r.add_col_multiple(c, t, &nq);
                }
                if !d[(t, c)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                // Divisibility: the pivot must divide the whole trailing block.
                let bad = (t + 1..rows).flat_map(|r| (t + 1..cols).map(move |c| (r, c))).find(|&(r, c)| !(&d[(r, c)] % &d[(t, t)]).is_zero());
                match bad {
                    None => break,
                    Some((r, _)) => {
                        let one = BigInt::one();
                        d.add_row_multiple(t, r, &one);
                        if let Some(l) = left.as_mut() {
                            l.add_row_multiple(t, r, &one);
                        }
                        continue;
                    }
                }
            }
            // Move the smallest entry of row/column t to the pivot.
            let mut best = (t, t);
            for r in t..rows {
                if !d[(r, t)].is_zero() && d[(r, t)].abs() < d[best].abs() {
                    best = (r, t);
                }
            }
            for c in t..cols {
                if !d[(t, c)].is_zero() && d[(t, c)].abs() < d[best].abs() {
                    best = (t, c);
                }
            }
            if best.0 != t {
                d.swap_rows(t, best.0);
                if let Some(l) = left.as_mut() {
                    l.swap_rows(t, best.0);
                }
            }
            if best.1 != t {
                d.swap_cols(t, best.1);
                if let Some(r) = right.as_mut() {
                    r.swap_cols(t, best.1);
                }
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            if let Some(l) = left.as_mut() {
                l.negate_row(t);
            }
        }
        t += 1;
    }
    Smith { diag: d, left, right, rank: t }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, e: &[i64]) -> IntMatrix {
        IntMatrix::from_i64(rows, cols, e)
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(m(2, 2, &[1, 2, 3, 4]).det(), BigInt::from(-2));
        assert_eq!(m(3, 3, &[1, 2, 3, 0, 1, 4, 5, 6, 0]).det(), BigInt::from(1));
        assert_eq!(m(2, 2, &[0, 1, 1, 0]).det(), BigInt::from(-1));
        assert_eq!(IntMatrix::zeros(0, 0).det(), BigInt::one());
    }

    #[test]
    fn unimodular_inverse_roundtrip() {
        let a = m(3, 3, &[1, 2, 3, 0, 1, 4, 5, 6, 0]);
        let inv = a.unimodular_inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(m(2, 2, &[2, 0, 0, 1]).unimodular_inverse().is_none());
    }

    #[test]
    fn kernel_of_functional_is_saturated() {
        let a = m(1, 3, &[2, 4, 6]);
        let k = a.kernel_basis();
        assert_eq!(k.shape(), (3, 2));
        assert!(a.mul(&k).is_zero());
        let ce = a.column_echelon();
        assert!(ce.transform.is_unimodular());
        assert!(ce.transform.mul(&ce.transform_inv).is_identity());
        assert_eq!(a.mul(&ce.transform), ce.echelon);
    }

    #[test]
    fn smith_of_projective_plane_style_matrix() {
        let a = m(2, 2, &[2, 4, 6, 8]);
        let s = a.smith();
        assert!(s.verify(&a));
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn smith_divisibility_fixup() {
        let a = m(2, 2, &[2, 0, 0, 3]);
        let s = a.smith();
        assert!(s.verify(&a));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }
}
