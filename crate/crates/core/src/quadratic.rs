//! `(ε, Λ)`-quadratic modules on free `ℤ`-modules of finite rank.
//!
//! A module is stored as its Gram matrix `λ(bᵢ, bⱼ)` and the values `μ(bᵢ)`
//! on the basis. `μ` on an arbitrary vector `x = Σ aᵢ bᵢ` is the closed form
//!
//! ```text
//! μ(x) = Σᵢ aᵢ² μ(bᵢ) + Σ_{i<j} aᵢ aⱼ λ(bᵢ, bⱼ)   (mod Λ)
//! ```
//!
//! which is the only extension of the basis values compatible with
//! `μ(a·x) = a² μ(x)` and `μ(x+y) − μ(x) − μ(y) ≡ λ(x, y)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{input, Error, Result};
use crate::form::{FormParameter, LambdaSub, MuValue};
use crate::matrix::IntMatrix;
use crate::search::{self, ColumnSpec};

/// An integer vector in the coordinates of a module basis.
pub type IntVector = Vec<BigInt>;

pub fn int_vector(v: &[i64]) -> IntVector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadraticModule {
    param: FormParameter,
    gram: IntMatrix,
    mu: Vec<MuValue>,
}

impl fmt::Debug for QuadraticModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mu: Vec<String> = self.mu.iter().map(ToString::to_string).collect();
        write!(f, "QuadraticModule {{ param: {}, gram: {:?}, mu: [{}] }}", self.param, self.gram, mu.join(", "))
    }
}

/// The first violated module invariant, as reported by [`QuadraticModule::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub invariant: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant, self.detail)
    }
}

impl QuadraticModule {
    /// Assembles a module. Only shapes are checked here; the form axioms are
    /// checked by [`validate`](Self::validate) so that invalid data can still
    /// be loaded and diagnosed.
    pub fn new(param: FormParameter, gram: IntMatrix, mu: Vec<MuValue>) -> Result<Self> {
        if !gram.is_square() {
            return input(format!("gram matrix must be square, got {:?}", gram.shape()));
        }
        if mu.len() != gram.rows() {
            return input(format!("expected {} mu values, got {}", gram.rows(), mu.len()));
        }
        if let Some(bad) = mu.iter().find(|m| m.lambda() != param.lambda()) {
            return input(format!("mu value {bad} does not live in Z/Lambda for {param}"));
        }
        Ok(Self { param, gram, mu })
    }

    /// Convenience constructor from small integers; `mu` entries are reduced
    /// into `ℤ/Λ`.
    pub fn from_i64(param: FormParameter, gram: &[Vec<i64>], mu: &[i64]) -> Result<Self> {
        let gram = if gram.is_empty() { IntMatrix::zeros(0, 0) } else { IntMatrix::from_rows(gram) };
        let mu = mu.iter().map(|&m| param.mu(m)).collect();
        Self::new(param, gram, mu)
    }

    /// The rank-0 module.
    pub fn zero(param: FormParameter) -> Self {
        Self { param, gram: IntMatrix::zeros(0, 0), mu: Vec::new() }
    }

    /// `H^g`: `g` orthogonal copies of the hyperbolic plane with Gram
    /// `[[0, 1], [ε, 0]]` and `μ(e) = μ(f) = 0`.
    pub fn hyperbolic(param: FormParameter, g: usize) -> Self {
        let n = 2 * g;
        let mut gram = IntMatrix::zeros(n, n);
        for i in 0..g {
            gram[(2 * i, 2 * i + 1)] = BigInt::one();
            gram[(2 * i + 1, 2 * i)] = BigInt::from(param.eps());
        }
        Self { param, gram, mu: vec![param.mu_zero(); n] }
    }

    pub fn param(&self) -> FormParameter {
        self.param
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn mu_basis(&self) -> &[MuValue] {
        &self.mu
    }

    fn check_len(&self, x: &[BigInt]) -> Result<()> {
        if x.len() != self.rank() {
            return input(format!("vector of length {} in a module of rank {}", x.len(), self.rank()));
        }
        Ok(())
    }

    /// `λ(x, y) = xᵀ · gram · y`.
    pub fn eval_lambda(&self, x: &[BigInt], y: &[BigInt]) -> Result<BigInt> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.lambda_unchecked(x, y))
    }

    pub(crate) fn lambda_unchecked(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let n = self.rank();
        let mut acc = BigInt::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            let mut row = BigInt::zero();
            for j in 0..n {
                if !y[j].is_zero() {
                    row += &self.gram[(i, j)] * &y[j];
                }
            }
            acc += &x[i] * row;
        }
        acc
    }

    /// `μ(x)` by the closed form, reduced modulo `Λ`.
    pub fn eval_mu(&self, x: &[BigInt]) -> Result<MuValue> {
        self.check_len(x)?;
        Ok(self.mu_unchecked(x))
    }

    pub(crate) fn mu_unchecked(&self, x: &[BigInt]) -> MuValue {
        MuValue::reduce(self.param.lambda(), &self.mu_integer(x))
    }

    /// The closed form before reduction modulo `Λ`.
    fn mu_integer(&self, x: &[BigInt]) -> BigInt {
        if self.param.lambda() == LambdaSub::All {
            return BigInt::zero();
        }
        let n = self.rank();
        let mut acc = BigInt::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            acc += &x[i] * &x[i] * self.mu[i].representative();
            for j in i + 1..n {
                if !x[j].is_zero() {
                    acc += &x[i] * &x[j] * &self.gram[(i, j)];
                }
            }
        }
        acc
    }

    /// Returns the first violated invariant, if any.
    pub fn validate(&self) -> Result<(), Violation> {
        let n = self.rank();
        let eps = BigInt::from(self.param.eps());
        for i in 0..n {
            for j in 0..n {
                if self.gram[(i, j)] != &eps * &self.gram[(j, i)] {
                    let kind = if self.param.is_skew() { "skew-symmetry" } else { "symmetry" };
                    return Err(Violation {
                        invariant: "epsilon-symmetry",
                        detail: format!("gram[{i}][{j}] = {} but epsilon*gram[{j}][{i}] = {} ({kind} required)", self.gram[(i, j)], &eps * &self.gram[(j, i)]),
                    });
                }
            }
        }
        if self.param.is_skew() {
            if let Some(i) = (0..n).find(|&i| !self.gram[(i, i)].is_zero()) {
                return Err(Violation { invariant: "zero-diagonal", detail: format!("gram[{i}][{i}] = {} must vanish for a skew form", self.gram[(i, i)]) });
            }
        }
        if self.param == FormParameter::SYMMETRIC_EVEN {
            for i in 0..n {
                let twice = self.mu[i].representative() * 2;
                if self.gram[(i, i)] != twice {
                    let detail = if self.gram[(i, i)].is_odd() {
                        format!("gram[{i}][{i}] = {} is odd, so no quadratic refinement exists", self.gram[(i, i)])
                    } else {
                        format!("gram[{i}][{i}] = {} but 2*mu[{i}] = {twice}", self.gram[(i, i)])
                    };
                    return Err(Violation { invariant: "lambda(x,x)=2mu(x)", detail });
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Orthogonal direct sum: block-diagonal Gram, concatenated `μ`.
    pub fn direct_sum(&self, other: &QuadraticModule) -> Result<QuadraticModule> {
        if self.param != other.param {
            return input(format!("direct sum of modules with form parameters {} and {}", self.param, other.param));
        }
        let mut mu = self.mu.clone();
        mu.extend(other.mu.iter().cloned());
        Ok(QuadraticModule { param: self.param, gram: self.gram.block_diag(&other.gram), mu })
    }

    /// `self ⊕ H^k`.
    pub fn stabilize(&self, k: usize) -> QuadraticModule {
        self.direct_sum(&QuadraticModule::hyperbolic(self.param, k)).expect("same form parameter")
    }

    pub fn determinant(&self) -> BigInt {
        self.gram.det()
    }

    /// `x ↦ λ(−, x)` is an isomorphism `M → M*`.
    pub fn is_nondegenerate(&self) -> bool {
        self.determinant().abs().is_one()
    }

    /// The module obtained by restricting the form to the columns of `basis`
    /// (a `rank × k` matrix).
    pub fn restrict(&self, basis: &IntMatrix) -> Result<QuadraticModule> {
        if basis.rows() != self.rank() {
            return input(format!("basis has {} rows, module has rank {}", basis.rows(), self.rank()));
        }
        let gram = basis.transpose().mul(&self.gram).mul(basis);
        let mu = (0..basis.cols()).map(|j| self.mu_unchecked(&basis.column(j))).collect();
        Ok(QuadraticModule { param: self.param, gram, mu })
    }

    /// Whether `matrix` (`target.rank × self.rank`) preserves `λ` and `μ`.
    pub fn is_morphism_to(&self, matrix: &IntMatrix, target: &QuadraticModule) -> Result<bool> {
        is_morphism(matrix, self, target)
    }

    /// The Arf invariant of the mod-2 quadratic form `x ↦ μ(x)`, by counting:
    /// 0 if `μ` vanishes on a strict majority of `𝔽₂^rank`, else 1.
    pub fn arf_invariant(&self) -> Result<bool> {
        if self.param != FormParameter::SKEW_EVEN {
            return input(format!("Arf invariant needs form parameter (-1, even), got {}", self.param));
        }
        let n = self.rank();
        if self.determinant().is_even() {
            return input("gram matrix is degenerate modulo 2");
        }
        if n > 26 {
            return Err(Error::ResourceLimit(format!("Arf invariant by counting at rank {n}")));
        }
        let mu: Vec<bool> = self.mu.iter().map(|m| !m.is_zero()).collect();
        let odd: Vec<u32> = (0..n).map(|i| (0..n).filter(|&j| j > i && self.gram[(i, j)].is_odd()).fold(0u32, |acc, j| acc | (1 << j))).collect();
        let mut zeros: u64 = 0;
        for x in 0u32..(1u32 << n) {
            let mut v = false;
            for i in 0..n {
                if x >> i & 1 == 1 {
                    v ^= mu[i];
                    v ^= (odd[i] & x).count_ones() & 1 == 1;
                }
            }
            if !v {
                zeros += 1;
            }
        }
        Ok(2 * zeros <= 1u64 << n)
    }

    /// Largest `g ≤ rank/2` admitting a morphism `H^g → self` with entries in
    /// `[−bound, bound]`, together with one witness. A lower bound for the
    /// Witt index.
    pub fn witt_index_lower_bound(&self, bound: u32) -> Result<(usize, QModMorphism)> {
        for g in (1..=self.rank() / 2).rev() {
            let h = QuadraticModule::hyperbolic(self.param, g);
            if let Some(m) = search::first_morphism(&h, self, bound)? {
                return Ok((g, QModMorphism { source: h, target: self.clone(), matrix: m }));
            }
        }
        let h = QuadraticModule::zero(self.param);
        Ok((0, QModMorphism { source: h, target: self.clone(), matrix: IntMatrix::zeros(self.rank(), 0) }))
    }

    /// `g_lb(self ⊕ H^k) − k`, a lower bound for the stable Witt index.
    pub fn stable_witt_lower_bound(&self, k: usize, bound: u32) -> Result<i64> {
        let (g, _) = self.stabilize(k).witt_index_lower_bound(bound)?;
        Ok(g as i64 - k as i64)
    }

    /// All morphisms `H^g → self` with entries in `[−bound, bound]`, in
    /// lexicographic order of their column sequences.
    pub fn enumerate_hyperbolic_morphisms(&self, g: usize, bound: u32) -> Result<Vec<QModMorphism>> {
        let h = QuadraticModule::hyperbolic(self.param, g);
        Ok(search::all_morphisms(&h, self, bound)?
            .into_iter()
            .map(|matrix| QModMorphism { source: h.clone(), target: self.clone(), matrix })
            .collect())
    }

    /// Searches for an isomorphism `self → other` with entries in
    /// `[−bound, bound]`. `None` does not certify non-isomorphism.
    pub fn is_isomorphic_bounded(&self, other: &QuadraticModule, bound: u32) -> Result<Option<QModMorphism>> {
        if self.param != other.param {
            return input("isomorphism search between different form parameters");
        }
        if self.rank() != other.rank() {
            return input(format!("ranks differ: {} vs {}", self.rank(), other.rank()));
        }
        let spec = ColumnSpec::from_module(self);
        let mut found = None;
        search::search_columns(&spec, other, bound, &mut |cols: &IntMatrix| {
            if cols.is_unimodular() {
                found = Some(cols.clone());
                true
            } else {
                false
            }
        })?;
        Ok(found.map(|matrix| QModMorphism { source: self.clone(), target: other.clone(), matrix }))
    }
}

/// Whether `matrix` is a morphism `source → target`: it preserves `λ` on all
/// basis pairs and `μ` on all basis vectors.
pub fn is_morphism(matrix: &IntMatrix, source: &QuadraticModule, target: &QuadraticModule) -> Result<bool> {
    if source.param != target.param {
        return input(format!("morphism between form parameters {} and {}", source.param, target.param));
    }
    if matrix.shape() != (target.rank(), source.rank()) {
        return input(format!("matrix shape {:?}, expected {:?}", matrix.shape(), (target.rank(), source.rank())));
    }
    let pulled = matrix.transpose().mul(target.gram()).mul(matrix);
    if &pulled != source.gram() {
        return Ok(false);
    }
    Ok((0..source.rank()).all(|i| target.mu_unchecked(&matrix.column(i)) == source.mu[i]))
}

/// A form-preserving linear map; columns are the images of the source basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QModMorphism {
    pub source: QuadraticModule,
    pub target: QuadraticModule,
    pub matrix: IntMatrix,
}

impl QModMorphism {
    /// Checks the morphism conditions before wrapping.
    pub fn new(source: QuadraticModule, target: QuadraticModule, matrix: IntMatrix) -> Result<Self> {
        if !is_morphism(&matrix, &source, &target)? {
            return input("matrix does not preserve the quadratic structure");
        }
        Ok(Self { source, target, matrix })
    }

    pub fn identity(m: &QuadraticModule) -> Self {
        Self { source: m.clone(), target: m.clone(), matrix: IntMatrix::identity(m.rank()) }
    }

    pub fn is_valid(&self) -> bool {
        is_morphism(&self.matrix, &self.source, &self.target).unwrap_or(false)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &QModMorphism) -> Result<QModMorphism> {
        if other.source != self.target {
            return input("composition of non-composable morphisms");
        }
        Ok(QModMorphism { source: self.source.clone(), target: other.target.clone(), matrix: other.matrix.mul(&self.matrix) })
    }

    pub fn image(&self, x: &[BigInt]) -> IntVector {
        self.matrix.mul_vec(x)
    }

    /// For an isomorphism, its inverse (validated as a morphism).
    pub fn inverse(&self) -> Option<QModMorphism> {
        let inv = self.matrix.unimodular_inverse()?;
        is_morphism(&inv, &self.target, &self.source).ok()?.then(|| QModMorphism { source: self.target.clone(), target: self.source.clone(), matrix: inv })
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_valid() && self.inverse().is_some()
    }

    /// The orthogonal complement of the image, with a certificate that the
    /// target splits as `source ⊕ complement`.
    pub fn orthogonal_complement(&self) -> Result<Complement> {
        orthogonal_complement(self)
    }
}

/// Result of [`orthogonal_complement`].
#[derive(Clone, Debug)]
pub struct Complement {
    /// `f(M)^⊥` with the form restricted to `basis`.
    pub module: QuadraticModule,
    /// `target.rank × (target.rank − source.rank)`; columns span `f(M)^⊥`.
    pub basis: IntMatrix,
    /// `[f | basis]`: an isomorphism `source ⊕ complement → target`.
    pub change_of_basis: IntMatrix,
}

impl Complement {
    /// Re-checks the splitting certificate against `f`.
    pub fn verify(&self, f: &QModMorphism) -> bool {
        let Ok(sum) = f.source.direct_sum(&self.module) else { return false };
        self.change_of_basis.is_unimodular()
            && is_morphism(&self.change_of_basis, &sum, &f.target).unwrap_or(false)
            && f.matrix.transpose().mul(f.target.gram()).mul(&self.basis).is_zero()
    }
}

/// Computes `{y : λ(f(bᵢ), y) = 0 ∀i}` as a saturated sublattice and the
/// splitting `target ≅ source ⊕ complement`. Requires a nondegenerate source.
pub fn orthogonal_complement(f: &QModMorphism) -> Result<Complement> {
    if !f.is_valid() {
        return input("orthogonal complement of a map that is not a morphism");
    }
    if !f.source.is_nondegenerate() {
        return Err(Error::Unsupported(format!("source form has determinant {}, splitting needs +-1", f.source.determinant())));
    }
    let pairing = f.matrix.transpose().mul(f.target.gram());
    let ce = pairing.column_echelon();
    debug_assert_eq!(ce.rank, f.source.rank());
    let basis = ce.transform.column_range(ce.rank, f.target.rank()).size_reduce_columns();
    let module = f.target.restrict(&basis)?;
    let change_of_basis = f.matrix.hstack(&basis);
    let out = Complement { module, basis, change_of_basis };
    if !out.verify(f) {
        return Err(Error::Unsupported("complement certificate failed to verify".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(param: FormParameter, g: usize) -> QuadraticModule {
        QuadraticModule::hyperbolic(param, g)
    }

    fn v(x: &[i64]) -> IntVector {
        int_vector(x)
    }

    #[test]
    fn lambda_on_hyperbolic_planes() {
        let m = h(FormParameter::SKEW_EVEN, 1);
        assert_eq!(m.eval_lambda(&v(&[1, 0]), &v(&[0, 1])).unwrap(), BigInt::from(1));
        assert_eq!(m.eval_lambda(&v(&[0, 1]), &v(&[1, 0])).unwrap(), BigInt::from(-1));
        assert_eq!(m.eval_lambda(&v(&[3, -2]), &v(&[3, -2])).unwrap(), BigInt::zero());
        let m2 = h(FormParameter::SYMMETRIC_EVEN, 2);
        // e1 + f2 against f1 + e2
        assert_eq!(m2.eval_lambda(&v(&[1, 0, 0, 1]), &v(&[0, 1, 1, 0])).unwrap(), BigInt::from(2));
        assert!(matches!(m.eval_lambda(&v(&[1]), &v(&[0, 1])), Err(Error::Input(_))));
    }

    #[test]
    fn mu_closed_form_examples() {
        for p in FormParameter::ALL {
            assert!(h(p, 1).eval_mu(&v(&[1, 0])).unwrap().is_zero());
        }
        let sym = h(FormParameter::SYMMETRIC_EVEN, 1);
        assert_eq!(sym.eval_mu(&v(&[1, 1])).unwrap(), MuValue::Int(BigInt::from(1)));
        let skew = h(FormParameter::SKEW_EVEN, 1);
        // f + 2e
        assert_eq!(skew.eval_mu(&v(&[2, 1])).unwrap(), MuValue::Bit(false));
        assert!(skew.eval_mu(&v(&[1])).is_err());
    }

    #[test]
    fn validate_examples() {
        for p in FormParameter::ALL {
            for g in 0..4 {
                assert!(h(p, g).validate().is_ok());
            }
        }
        let odd = QuadraticModule::from_i64(FormParameter::SYMMETRIC_EVEN, &[vec![1, 0], vec![0, -1]], &[0, 0]).unwrap();
        assert_eq!(odd.validate().unwrap_err().invariant, "lambda(x,x)=2mu(x)");
        let not_skew = QuadraticModule::from_i64(FormParameter::SKEW_EVEN, &[vec![0, 1], vec![1, 0]], &[0, 0]).unwrap();
        assert_eq!(not_skew.validate().unwrap_err().invariant, "epsilon-symmetry");
    }

    #[test]
    fn morphism_examples() {
        let sym = h(FormParameter::SYMMETRIC_EVEN, 1);
        assert!(is_morphism(&IntMatrix::identity(2), &sym, &sym).unwrap());
        // e -> e, f -> f + e
        let shear = IntMatrix::from_i64(2, 2, &[1, 1, 0, 1]);
        assert!(!is_morphism(&shear, &sym, &sym).unwrap());
        let skew = h(FormParameter::SKEW_EVEN, 1);
        // e -> e, f -> f + 2e
        let shear2 = IntMatrix::from_i64(2, 2, &[1, 2, 0, 1]);
        assert!(is_morphism(&shear2, &skew, &skew).unwrap());
        assert!(matches!(is_morphism(&IntMatrix::identity(2), &sym, &skew), Err(Error::Input(_))));
    }

    #[test]
    fn direct_sum_examples() {
        let p = FormParameter::SYMMETRIC_EVEN;
        assert_eq!(h(p, 1).direct_sum(&h(p, 1)).unwrap(), h(p, 2));
        assert_eq!(h(p, 2).direct_sum(&QuadraticModule::zero(p)).unwrap(), h(p, 2));
        let a = QuadraticModule::from_i64(p, &[vec![2]], &[1]).unwrap();
        let b = QuadraticModule::from_i64(p, &[vec![-2]], &[-1]).unwrap();
        let s = a.direct_sum(&b).unwrap();
        assert_eq!(s.gram(), &IntMatrix::from_i64(2, 2, &[2, 0, 0, -2]));
        assert!(s.is_valid());
        assert!(a.direct_sum(&h(FormParameter::SKEW_EVEN, 1)).is_err());
    }

    #[test]
    fn complement_examples() {
        let p = FormParameter::SKEW_EVEN;
        let inc = QModMorphism::new(h(p, 1), h(p, 2), IntMatrix::from_i64(4, 2, &[1, 0, 0, 1, 0, 0, 0, 0])).unwrap();
        let c = inc.orthogonal_complement().unwrap();
        assert_eq!(c.module.rank(), 2);
        assert!(c.module.is_isomorphic_bounded(&h(p, 1), 1).unwrap().is_some());

        let id = QModMorphism::identity(&h(p, 1));
        assert_eq!(id.orthogonal_complement().unwrap().module.rank(), 0);

        // e -> e1, f -> f1 + e2
        let m = IntMatrix::from_i64(4, 2, &[1, 0, 0, 1, 0, 1, 0, 0]);
        let f = QModMorphism::new(h(p, 1), h(p, 2), m).unwrap();
        let c = f.orthogonal_complement().unwrap();
        assert!(c.verify(&f));
        assert_eq!(c.module.rank(), 2);
        let g = c.module.gram();
        assert!(g[(0, 1)].abs().is_one() && g[(0, 0)].is_zero());

        let degenerate = QuadraticModule::from_i64(p, &[vec![0, 2], vec![-2, 0]], &[0, 0]).unwrap();
        let target = degenerate.direct_sum(&h(p, 1)).unwrap();
        let inc = QModMorphism::new(degenerate, target, IntMatrix::from_i64(4, 2, &[1, 0, 0, 1, 0, 0, 0, 0])).unwrap();
        assert!(matches!(inc.orthogonal_complement(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn enumeration_examples() {
        let sym = h(FormParameter::SYMMETRIC_EVEN, 1);
        let found = sym.enumerate_hyperbolic_morphisms(1, 1).unwrap();
        assert_eq!(found.len(), 4);
        assert!(found.iter().all(QModMorphism::is_valid));
        assert!(QuadraticModule::zero(FormParameter::SKEW_EVEN).enumerate_hyperbolic_morphisms(1, 3).unwrap().is_empty());
        let h2 = h(FormParameter::SKEW_EVEN, 2);
        assert!(h2.enumerate_hyperbolic_morphisms(2, 1).unwrap().iter().any(|m| m.matrix.is_identity()));
    }

    #[test]
    fn witt_examples() {
        let p = FormParameter::SYMMETRIC_EVEN;
        assert_eq!(h(p, 3).witt_index_lower_bound(1).unwrap().0, 3);
        let zero_form = QuadraticModule::from_i64(p, &[vec![0, 0], vec![0, 0]], &[0, 0]).unwrap();
        assert_eq!(zero_form.witt_index_lower_bound(2).unwrap().0, 0);
        let d = QuadraticModule::from_i64(p, &[vec![2, 0], vec![0, -2]], &[1, -1]).unwrap();
        assert_eq!(d.witt_index_lower_bound(3).unwrap().0, 0);
        assert_eq!(h(p, 2).stable_witt_lower_bound(1, 1).unwrap(), 2);
        assert_eq!(QuadraticModule::zero(p).stable_witt_lower_bound(2, 1).unwrap(), 0);
        assert!(d.stable_witt_lower_bound(1, 2).unwrap() >= 0);
    }

    #[test]
    fn arf_examples() {
        let p = FormParameter::SKEW_EVEN;
        assert!(!h(p, 1).arf_invariant().unwrap());
        assert!(!h(p, 2).arf_invariant().unwrap());
        let odd = QuadraticModule::from_i64(p, &[vec![0, 1], vec![-1, 0]], &[1, 1]).unwrap();
        assert!(odd.arf_invariant().unwrap());
        assert!(h(FormParameter::SKEW_ALL, 1).arf_invariant().is_err());
        let degenerate = QuadraticModule::from_i64(p, &[vec![0, 2], vec![-2, 0]], &[0, 0]).unwrap();
        assert!(degenerate.arf_invariant().is_err());
    }

    #[test]
    fn isomorphism_search_examples() {
        let p = FormParameter::SKEW_EVEN;
        let hp = h(p, 1);
        assert!(hp.is_isomorphic_bounded(&hp, 1).unwrap().unwrap().matrix.is_identity());
        let zero_form = QuadraticModule::from_i64(p, &[vec![0, 0], vec![0, 0]], &[0, 0]).unwrap();
        assert!(hp.is_isomorphic_bounded(&zero_form, 2).unwrap().is_none());
        let base = IntMatrix::from_i64(2, 2, &[1, 2, 0, 1]);
        let changed = hp.restrict(&base).unwrap();
        assert!(hp.is_isomorphic_bounded(&changed, 2).unwrap().is_some());
    }
}
