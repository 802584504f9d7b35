//! Form parameters `(ε, Λ)` over the integers and values in `ℤ/Λ`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

/// Sign `ε` of the bilinear form: `λ(x, y) = ε λ(y, x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i64(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => input(format!("epsilon must be +1 or -1, got {v}")),
        }
    }
}

/// The subgroup `Λ ⊆ ℤ`: `{0}`, `2ℤ` or `ℤ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaSub {
    Zero,
    Even,
    All,
}

impl LambdaSub {
    /// Whether `a ∈ Λ`.
    pub fn contains(self, a: &BigInt) -> bool {
        match self {
            LambdaSub::Zero => a.is_zero(),
            LambdaSub::Even => a.is_even(),
            LambdaSub::All => true,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LambdaSub::Zero => "zero",
            LambdaSub::Even => "even",
            LambdaSub::All => "all",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(LambdaSub::Zero),
            "even" => Ok(LambdaSub::Even),
            "all" => Ok(LambdaSub::All),
            _ => input(format!("lambda must be zero|even|all, got {s:?}")),
        }
    }
}

/// A form parameter `(ε, Λ)`. Over `ℤ` only `(+1, {0})`, `(−1, 2ℤ)` and
/// `(−1, ℤ)` satisfy `{a − εa} ⊆ Λ ⊆ {a | a + εa = 0}`; nothing else can be
/// constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormParameter {
    epsilon: Sign,
    lambda: LambdaSub,
}

impl FormParameter {
    pub const SYMMETRIC_EVEN: FormParameter = FormParameter { epsilon: Sign::Plus, lambda: LambdaSub::Zero };
    pub const SKEW_EVEN: FormParameter = FormParameter { epsilon: Sign::Minus, lambda: LambdaSub::Even };
    pub const SKEW_ALL: FormParameter = FormParameter { epsilon: Sign::Minus, lambda: LambdaSub::All };

    pub const ALL: [FormParameter; 3] = [Self::SYMMETRIC_EVEN, Self::SKEW_EVEN, Self::SKEW_ALL];

    pub fn new(epsilon: Sign, lambda: LambdaSub) -> Result<Self> {
        let p = FormParameter { epsilon, lambda };
        if Self::ALL.contains(&p) {
            Ok(p)
        } else {
            input(format!("({}, {}) is not a form parameter over the integers", epsilon.as_i64(), lambda.name()))
        }
    }

    pub fn epsilon(self) -> Sign {
        self.epsilon
    }

    pub fn eps(self) -> i64 {
        self.epsilon.as_i64()
    }

    pub fn lambda(self) -> LambdaSub {
        self.lambda
    }

    pub fn is_skew(self) -> bool {
        self.epsilon == Sign::Minus
    }

    /// Checks `{a − εa | a ∈ ℤ} ⊆ Λ ⊆ {a | a + εa = 0}` on a window of
    /// integers. Both sides are subgroups generated by small elements, so a
    /// window containing a few generators decides it.
    pub fn containment_holds(self) -> bool {
        let eps = BigInt::from(self.eps());
        (-6i64..=6).all(|a| {
            let a = BigInt::from(a);
            let lower = &a - &eps * &a;
            let lower_ok = self.lambda.contains(&lower);
            let upper_ok = !self.lambda.contains(&a) || (&a + &eps * &a).is_zero();
            lower_ok && upper_ok
        })
    }

    /// The additive identity of `ℤ/Λ`.
    pub fn mu_zero(self) -> MuValue {
        MuValue::reduce(self.lambda, &BigInt::zero())
    }

    pub fn mu(self, v: impl Into<BigInt>) -> MuValue {
        MuValue::reduce(self.lambda, &v.into())
    }
}

impl fmt::Display for FormParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+}, {})", self.eps(), self.lambda.name())
    }
}

/// An element of `ℤ/Λ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MuValue {
    /// `Λ = {0}`: the integer itself.
    Int(BigInt),
    /// `Λ = 2ℤ`: parity.
    Bit(bool),
    /// `Λ = ℤ`: the trivial group.
    Unit,
}

impl MuValue {
    /// Reduces an integer into `ℤ/Λ`.
    pub fn reduce(lambda: LambdaSub, v: &BigInt) -> MuValue {
        match lambda {
            LambdaSub::Zero => MuValue::Int(v.clone()),
            LambdaSub::Even => MuValue::Bit(v.is_odd()),
            LambdaSub::All => MuValue::Unit,
        }
    }

    pub fn lambda(&self) -> LambdaSub {
        match self {
            MuValue::Int(_) => LambdaSub::Zero,
            MuValue::Bit(_) => LambdaSub::Even,
            MuValue::Unit => LambdaSub::All,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            MuValue::Int(v) => v.is_zero(),
            MuValue::Bit(b) => !b,
            MuValue::Unit => true,
        }
    }

    /// A canonical integer representative (`0`/`1` for bits, `0` for the unit).
    pub fn representative(&self) -> BigInt {
        match self {
            MuValue::Int(v) => v.clone(),
            MuValue::Bit(b) => BigInt::from(*b as u8),
            MuValue::Unit => BigInt::zero(),
        }
    }

    pub fn add(&self, other: &MuValue) -> MuValue {
        match (self, other) {
            (MuValue::Int(a), MuValue::Int(b)) => MuValue::Int(a + b),
            (MuValue::Bit(a), MuValue::Bit(b)) => MuValue::Bit(a ^ b),
            (MuValue::Unit, MuValue::Unit) => MuValue::Unit,
            _ => panic!("adding values of different quotient groups"),
        }
    }

    pub fn neg(&self) -> MuValue {
        match self {
            MuValue::Int(a) => MuValue::Int(-a),
            other => other.clone(),
        }
    }

    pub fn sub(&self, other: &MuValue) -> MuValue {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> MuValue {
        match self {
            MuValue::Int(a) => MuValue::Int(a * k),
            MuValue::Bit(b) => MuValue::Bit(*b && k.is_odd()),
            MuValue::Unit => MuValue::Unit,
        }
    }

    /// Adds an integer (reduced into the same group).
    pub fn add_int(&self, k: &BigInt) -> MuValue {
        self.add(&MuValue::reduce(self.lambda(), k))
    }

    pub fn abs_representative(&self) -> BigInt {
        self.representative().abs()
    }
}

impl fmt::Display for MuValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuValue::Int(v) => write!(f, "{v}"),
            MuValue::Bit(b) => write!(f, "{}", *b as u8),
            MuValue::Unit => write!(f, "()"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_three_form_parameters() {
        let mut ok = 0;
        for e in [Sign::Plus, Sign::Minus] {
            for l in [LambdaSub::Zero, LambdaSub::Even, LambdaSub::All] {
                if FormParameter::new(e, l).is_ok() {
                    ok += 1;
                }
            }
        }
        assert_eq!(ok, 3);
    }

    #[test]
    fn containment_for_each_variant() {
        for p in FormParameter::ALL {
            assert!(p.containment_holds(), "{p}");
        }
        // The rejected combinations really do violate the containment.
        for (e, l) in [(Sign::Plus, LambdaSub::Even), (Sign::Plus, LambdaSub::All), (Sign::Minus, LambdaSub::Zero)] {
            assert!(!FormParameter { epsilon: e, lambda: l }.containment_holds());
        }
    }

    #[test]
    fn quotient_arithmetic() {
        let two = BigInt::from(2);
        let a = FormParameter::SKEW_EVEN.mu(3);
        assert_eq!(a, MuValue::Bit(true));
        assert!(a.add(&a).is_zero());
        assert!(a.scale(&two).is_zero());
        assert_eq!(FormParameter::SYMMETRIC_EVEN.mu(3).scale(&two), MuValue::Int(BigInt::from(6)));
        assert!(FormParameter::SKEW_ALL.mu(7).is_zero());
    }
}
