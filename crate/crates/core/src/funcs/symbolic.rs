//! Exact closed forms `sum_i c_i * b_i^n * n^(q_i)` over the rationals.
//!
//! Floating-point coefficients enter through their exact binary value, so a
//! zero test here is a statement about the represented sequences for every
//! `n`, not a sampled one.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};

use crate::seqspace::{Tail, TailRule};

type Key = (BigRational, Ratio<i64>);

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClosedForm {
    terms: BTreeMap<Key, BigRational>,
}

pub fn rational(v: f64) -> Option<BigRational> {
    BigRational::from_float(v)
}

impl ClosedForm {
    pub fn zero() -> Self {
        ClosedForm::default()
    }

    /// `c * base^n * n^power`.
    pub fn monomial(c: BigRational, base: BigRational, power: Ratio<i64>) -> Self {
        let mut out = ClosedForm::zero();
        out.insert(c, base, power);
        out
    }

    pub fn constant(c: BigRational) -> Self {
        ClosedForm::monomial(c, BigRational::one(), Ratio::zero())
    }

    pub fn from_f64(c: f64) -> Option<Self> {
        Some(ClosedForm::constant(rational(c)?))
    }

    /// `(-1)^n`
    pub fn alternating() -> Self {
        ClosedForm::monomial(BigRational::one(), -BigRational::one(), Ratio::zero())
    }

    pub fn from_rule(rule: TailRule) -> Option<Self> {
        Some(match rule {
            TailRule::Zero => ClosedForm::zero(),
            TailRule::Const(c) => ClosedForm::constant(rational(c)?),
            TailRule::Geometric(c, r) => {
                ClosedForm::monomial(rational(c)?, rational(r)?, Ratio::zero())
            }
            TailRule::Harmonic(c) => {
                ClosedForm::monomial(rational(c)?, BigRational::one(), Ratio::from_integer(-1))
            }
        })
    }

    pub fn from_tail(tail: &Tail) -> Option<Self> {
        tail.rules()
            .into_iter()
            .try_fold(ClosedForm::zero(), |acc, r| {
                Some(acc.add(&ClosedForm::from_rule(r)?))
            })
    }

    fn insert(&mut self, c: BigRational, base: BigRational, power: Ratio<i64>) {
        if c.is_zero() || base.is_zero() {
            return;
        }
        let key = (base, power);
        let entry = self
            .terms
            .entry(key.clone())
            .or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &ClosedForm) -> ClosedForm {
        let mut out = self.clone();
        for ((b, q), c) in &other.terms {
            out.insert(c.clone(), b.clone(), *q);
        }
        out
    }

    pub fn scale(&self, k: &BigRational) -> ClosedForm {
        let mut out = ClosedForm::zero();
        for ((b, q), c) in &self.terms {
            out.insert(c * k, b.clone(), *q);
        }
        out
    }

    pub fn mul(&self, other: &ClosedForm) -> ClosedForm {
        let mut out = ClosedForm::zero();
        for ((b1, q1), c1) in &self.terms {
            for ((b2, q2), c2) in &other.terms {
                out.insert(c1 * c2, b1 * b2, q1 + q2);
            }
        }
        out
    }

    fn single(&self) -> Option<(&BigRational, &BigRational, Ratio<i64>)> {
        if self.terms.len() != 1 {
            return None;
        }
        let ((b, q), c) = self.terms.iter().next()?;
        Some((c, b, *q))
    }

    /// `1 / self` for a single monomial.
    pub fn recip(&self) -> Option<ClosedForm> {
        let (c, b, q) = self.single()?;
        Some(ClosedForm::monomial(c.recip(), b.recip(), -q))
    }

    /// Exact square root of a single positive monomial with perfect-square
    /// rational coefficient and base.
    pub fn sqrt(&self) -> Option<ClosedForm> {
        let (c, b, q) = self.single()?;
        if !c.is_positive() || !b.is_positive() {
            return None;
        }
        Some(ClosedForm::monomial(
            rational_sqrt(c)?,
            rational_sqrt(b)?,
            q / Ratio::from_integer(2),
        ))
    }

    /// Floating-point value at index `n`.
    pub fn value(&self, n: usize) -> f64 {
        use num_traits::ToPrimitive;
        let nf = n as f64;
        self.terms
            .iter()
            .map(|((b, q), c)| {
                let b = b.to_f64().unwrap_or(f64::NAN);
                let q = *q.numer() as f64 / *q.denom() as f64;
                c.to_f64().unwrap_or(f64::NAN) * b.powf(nf) * nf.powf(q)
            })
            .sum()
    }
}

fn int_sqrt(v: &BigInt) -> Option<BigInt> {
    let r = num_integer::Roots::sqrt(v);
    (&r * &r == *v).then_some(r)
}

fn rational_sqrt(v: &BigRational) -> Option<BigRational> {
    Some(BigRational::new(int_sqrt(v.numer())?, int_sqrt(v.denom())?))
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((b, q), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            if !b.is_one() {
                write!(f, "*({b})^n")?;
            }
            if !q.is_zero() {
                write!(f, "*n^({q})")?;
            }
        }
        Ok(())
    }
}
