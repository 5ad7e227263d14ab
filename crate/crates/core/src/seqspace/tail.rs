use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::series::Envelope;
use super::sign::{eventual_sign, EventualSign, SignPattern, SCAN_CAP};
use crate::error::{Error, Result};

/// Closed-form value of a sequence at index `n` beyond an explicit prefix.
///
/// The same rule doubles as a per-index coefficient (weights of separable
/// series, coefficients of scalar pieces), in which case it applies from
/// `n = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTailRule", into = "RawTailRule")]
pub enum TailRule {
    Zero,
    /// `c`
    Const(f64),
    /// `c * r^n`, `|r| < 1`
    Geometric(f64, f64),
    /// `c / n`
    Harmonic(f64),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawTailRule {
    Zero {},
    Const { c: f64 },
    Geometric { c: f64, r: f64 },
    Harmonic { c: f64 },
}

impl TryFrom<RawTailRule> for TailRule {
    type Error = Error;

    fn try_from(raw: RawTailRule) -> Result<Self> {
        match raw {
            RawTailRule::Zero {} => Ok(TailRule::Zero),
            RawTailRule::Const { c } => TailRule::constant(c),
            RawTailRule::Geometric { c, r } => TailRule::geometric(c, r),
            RawTailRule::Harmonic { c } => TailRule::harmonic(c),
        }
    }
}

impl From<TailRule> for RawTailRule {
    fn from(rule: TailRule) -> Self {
        match rule {
            TailRule::Zero => RawTailRule::Zero {},
            TailRule::Const(c) => RawTailRule::Const { c },
            TailRule::Geometric(c, r) => RawTailRule::Geometric { c, r },
            TailRule::Harmonic(c) => RawTailRule::Harmonic { c },
        }
    }
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Invalid(format!("{what} must be finite, got {v}")))
    }
}

impl TailRule {
    pub fn constant(c: f64) -> Result<Self> {
        Ok(TailRule::Const(finite(c, "const coefficient")?))
    }

    pub fn geometric(c: f64, r: f64) -> Result<Self> {
        finite(c, "geometric coefficient")?;
        finite(r, "geometric ratio")?;
        if r.abs() >= 1.0 {
            return Err(Error::Invalid(format!(
                "geometric ratio must satisfy |r| < 1, got {r}"
            )));
        }
        Ok(TailRule::Geometric(c, r))
    }

    pub fn harmonic(c: f64) -> Result<Self> {
        Ok(TailRule::Harmonic(finite(c, "harmonic coefficient")?))
    }

    pub fn value(&self, n: usize) -> f64 {
        assert!(n >= 1, "sequence indices start at 1");
        match *self {
            TailRule::Zero => 0.0,
            TailRule::Const(c) => c,
            TailRule::Geometric(c, r) => c * powi(r, n),
            TailRule::Harmonic(c) => c / n as f64,
        }
    }

    /// True when `value(n) >= 0` for every `n >= 1`.
    pub fn is_nonnegative(&self) -> bool {
        match *self {
            TailRule::Zero => true,
            TailRule::Const(c) | TailRule::Harmonic(c) => c >= 0.0,
            TailRule::Geometric(c, r) => c == 0.0 || (c > 0.0 && r >= 0.0),
        }
    }

    /// True when the rule is identically zero on `n >= 1`.
    pub fn is_zero(&self) -> bool {
        match *self {
            TailRule::Zero => true,
            TailRule::Const(c) | TailRule::Harmonic(c) => c == 0.0,
            TailRule::Geometric(c, r) => c == 0.0 || r == 0.0,
        }
    }

    /// Majorant of `|value(n)|` valid for all `n >= 1`.
    pub fn envelope(&self) -> Envelope {
        match *self {
            TailRule::Zero => Envelope::zero(),
            TailRule::Const(c) => Envelope::monomial(c.abs(), 1.0, 0.0),
            TailRule::Geometric(c, r) => Envelope::monomial(c.abs(), r.abs(), 0.0),
            TailRule::Harmonic(c) => Envelope::monomial(c.abs(), 1.0, 1.0),
        }
    }
}

impl fmt::Display for TailRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TailRule::Zero => write!(f, "0"),
            TailRule::Const(c) => write!(f, "{c}"),
            TailRule::Geometric(c, r) => write!(f, "{c}*{r}^n"),
            TailRule::Harmonic(c) => write!(f, "{c}/n"),
        }
    }
}

pub(crate) fn powi(r: f64, n: usize) -> f64 {
    r.powi(i32::try_from(n).unwrap_or(i32::MAX))
}

/// A finite linear combination of tail rules, kept in canonical form:
/// `constant + harmonic / n + sum_i c_i * r_i^n` with distinct nonzero ratios
/// sorted ascending and nonzero coefficients.
///
/// Canonical form makes structural equality coincide with eventual equality
/// of the represented sequences.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Tail {
    constant: f64,
    harmonic: f64,
    geometric: Vec<(f64, f64)>,
}

impl Tail {
    pub fn zero() -> Self {
        Tail::default()
    }

    pub fn from_rule(rule: TailRule) -> Self {
        let mut tail = Tail::zero();
        match rule {
            TailRule::Zero => {}
            TailRule::Const(c) => tail.constant = c,
            TailRule::Harmonic(c) => tail.harmonic = c,
            TailRule::Geometric(c, r) => {
                if c != 0.0 && r != 0.0 {
                    tail.geometric.push((r, c));
                }
            }
        }
        tail
    }

    pub fn from_rules<I: IntoIterator<Item = TailRule>>(rules: I) -> Self {
        rules
            .into_iter()
            .fold(Tail::zero(), |acc, rule| acc.add(&Tail::from_rule(rule)))
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn harmonic(&self) -> f64 {
        self.harmonic
    }

    /// `(ratio, coefficient)` pairs.
    pub fn geometric(&self) -> &[(f64, f64)] {
        &self.geometric
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0.0 && self.harmonic == 0.0 && self.geometric.is_empty()
    }

    pub fn value(&self, n: usize) -> f64 {
        assert!(n >= 1, "sequence indices start at 1");
        let mut v = self.constant + self.harmonic / n as f64;
        for &(r, c) in &self.geometric {
            v += c * powi(r, n);
        }
        v
    }

    /// Canonical decomposition back into single rules.
    pub fn rules(&self) -> Vec<TailRule> {
        let mut out = Vec::new();
        if self.constant != 0.0 {
            out.push(TailRule::Const(self.constant));
        }
        for &(r, c) in &self.geometric {
            out.push(TailRule::Geometric(c, r));
        }
        if self.harmonic != 0.0 {
            out.push(TailRule::Harmonic(self.harmonic));
        }
        out
    }

    pub fn add(&self, other: &Tail) -> Tail {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Tail) -> Tail {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, lambda: f64) -> Tail {
        Tail::zero().axpy(lambda, self)
    }

    /// `self + t * other`, renormalized.
    pub fn axpy(&self, t: f64, other: &Tail) -> Tail {
        let mut geometric = self.geometric.clone();
        for &(r, c) in &other.geometric {
            match geometric.binary_search_by(|probe| probe.0.total_cmp(&r)) {
                Ok(i) => geometric[i].1 += t * c,
                Err(i) => geometric.insert(i, (r, t * c)),
            }
        }
        geometric.retain(|&(r, c)| c != 0.0 && r != 0.0);
        Tail {
            constant: self.constant + t * other.constant,
            harmonic: self.harmonic + t * other.harmonic,
            geometric,
        }
    }

    /// `limsup |value(n)|`: harmonic and geometric parts vanish at infinity.
    pub fn limsup_abs(&self) -> f64 {
        self.constant.abs()
    }

    /// Absolute summability of the tail.
    pub fn in_ell1(&self) -> bool {
        self.constant == 0.0 && self.harmonic == 0.0
    }

    /// Upper bound of `|value(n)|` over all `n >= 1`.
    pub fn sup_bound(&self) -> f64 {
        self.constant.abs()
            + self.harmonic.abs()
            + self
                .geometric
                .iter()
                .map(|&(r, c)| c.abs() * r.abs())
                .sum::<f64>()
    }

    pub fn envelope(&self) -> Envelope {
        let mut env = Envelope::monomial(self.constant.abs(), 1.0, 0.0).add(&Envelope::monomial(
            self.harmonic.abs(),
            1.0,
            1.0,
        ));
        for &(r, c) in &self.geometric {
            env = env.add(&Envelope::monomial(c.abs(), r.abs(), 0.0));
        }
        env
    }

    /// Monomials `(c, r, q)` meaning `c * r^n * n^q`.
    pub fn monomials(&self) -> Vec<(f64, f64, f64)> {
        let mut out = vec![(self.constant, 1.0, 0.0), (self.harmonic, 1.0, -1.0)];
        out.extend(self.geometric.iter().map(|&(r, c)| (c, r, 0.0)));
        out
    }

    pub fn eventual_sign(&self) -> Option<EventualSign> {
        eventual_sign(&self.monomials())
    }

    /// Exact sign census of `value(n)` over all `n > from`.
    pub fn scan_beyond(&self, from: usize) -> Result<TailScan> {
        let profile = self
            .eventual_sign()
            .ok_or(Error::UndecidableSign { from })?;
        if profile.pattern == SignPattern::Zero {
            return Ok(TailScan {
                first_negative: None,
                first_zero: Some(from + 1),
                first_positive: None,
            });
        }
        let settled = profile.settled_after.max(from);
        if settled - from > SCAN_CAP {
            return Err(Error::UndecidableSign { from });
        }
        let mut scan = TailScan::default();
        for n in from + 1..=settled {
            scan.record(n, self.value(n));
        }
        // Past `settled` the sign pattern holds strictly.
        let first = settled + 1;
        let next_with_parity = |even: bool| {
            if (first % 2 == 0) == even {
                first
            } else {
                first + 1
            }
        };
        let (pos, neg) = match profile.pattern {
            SignPattern::Positive => (Some(first), None),
            SignPattern::Negative => (None, Some(first)),
            SignPattern::Alternating { even_positive } => (
                Some(next_with_parity(even_positive)),
                Some(next_with_parity(!even_positive)),
            ),
            SignPattern::Zero => unreachable!(),
        };
        scan.first_positive = scan.first_positive.or(pos);
        scan.first_negative = scan.first_negative.or(neg);
        Ok(scan)
    }
}

/// First indices (beyond some offset) at which a tail is negative, zero or
/// positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TailScan {
    pub first_negative: Option<usize>,
    pub first_zero: Option<usize>,
    pub first_positive: Option<usize>,
}

impl TailScan {
    fn record(&mut self, n: usize, v: f64) {
        let slot = match v.partial_cmp(&0.0) {
            Some(Ordering::Less) => &mut self.first_negative,
            Some(Ordering::Equal) => &mut self.first_zero,
            _ => &mut self.first_positive,
        };
        if slot.is_none() {
            *slot = Some(n);
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.first_negative.is_none()
    }

    pub fn is_positive(&self) -> bool {
        self.first_negative.is_none() && self.first_zero.is_none()
    }

    /// First index violating strict positivity.
    pub fn first_nonpositive(&self) -> Option<usize> {
        match (self.first_negative, self.first_zero) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TailRepr {
    One(TailRule),
    Many(Vec<TailRule>),
}

impl Serialize for Tail {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let mut rules = self.rules();
        let repr = match rules.len() {
            0 => TailRepr::One(TailRule::Zero),
            1 => TailRepr::One(rules.remove(0)),
            _ => TailRepr::Many(rules),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Tail {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        Ok(match TailRepr::deserialize(deserializer)? {
            TailRepr::One(rule) => Tail::from_rule(rule),
            TailRepr::Many(rules) => Tail::from_rules(rules),
        })
    }
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rules = self.rules();
        if rules.is_empty() {
            return write!(f, "0");
        }
        for (i, rule) in rules.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{rule}")?;
        }
        Ok(())
    }
}
