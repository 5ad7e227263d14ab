use std::fmt;

use serde::{Deserialize, Serialize};

use super::tail::{Tail, TailRule};
use crate::error::{Error, Result};

/// A real sequence `(x_1, x_2, ...)`: an explicit prefix `x_1..x_m` followed
/// by a closed-form tail for `n > m`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub struct Point {
    prefix: Vec<f64>,
    tail: Tail,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    #[serde(default)]
    prefix: Vec<f64>,
    #[serde(default)]
    tail: Tail,
}

impl TryFrom<RawPoint> for Point {
    type Error = Error;

    fn try_from(raw: RawPoint) -> Result<Self> {
        Point::new(raw.prefix, raw.tail)
    }
}

impl From<Point> for RawPoint {
    fn from(p: Point) -> Self {
        RawPoint {
            prefix: p.prefix,
            tail: p.tail,
        }
    }
}

impl Point {
    pub fn new(prefix: Vec<f64>, tail: Tail) -> Result<Self> {
        if let Some(i) = prefix.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!(
                "prefix entry {} is not finite: {}",
                i + 1,
                prefix[i]
            )));
        }
        Ok(Point { prefix, tail })
    }

    /// Panics on non-finite prefix entries.
    pub fn from_rule(prefix: Vec<f64>, rule: TailRule) -> Self {
        Point::new(prefix, Tail::from_rule(rule)).expect("finite prefix")
    }

    pub fn zero() -> Self {
        Point::default()
    }

    /// The unit vector `e_n`.
    pub fn basis(n: usize) -> Self {
        assert!(n >= 1, "basis vectors are indexed from 1");
        let mut prefix = vec![0.0; n];
        prefix[n - 1] = 1.0;
        Point {
            prefix,
            tail: Tail::zero(),
        }
    }

    /// Constant sequence `(c, c, c, ...)`.
    pub fn constant(c: f64) -> Self {
        Point::from_rule(Vec::new(), TailRule::Const(c))
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn coordinate(&self, n: usize) -> f64 {
        assert!(n >= 1, "sequence indices start at 1");
        match self.prefix.get(n - 1) {
            Some(&v) => v,
            None => self.tail.value(n),
        }
    }

    /// First `k` coordinates.
    pub fn head(&self, k: usize) -> Vec<f64> {
        (1..=k).map(|n| self.coordinate(n)).collect()
    }

    pub fn in_ell1(&self) -> bool {
        self.tail.in_ell1()
    }

    /// Every representable point is bounded.
    pub fn in_ellinf(&self) -> bool {
        true
    }

    /// `sup |x_n|`. Exact except for tails whose supremum is only approached
    /// in the limit, where the limit is returned.
    pub fn sup_abs(&self) -> f64 {
        let prefix_max = self.prefix.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        prefix_max.max(self.tail_sup_beyond(self.prefix.len()))
    }

    fn tail_sup_beyond(&self, m: usize) -> f64 {
        const SCAN: usize = 100_000;
        let limit = self.tail.constant().abs();
        let decaying = self.tail.sup_bound() - limit;
        let rmax = self
            .tail
            .geometric()
            .iter()
            .fold(0.0_f64, |a, &(r, _)| a.max(r.abs()));
        let mut best = limit;
        for n in m + 1..=m + SCAN {
            best = best.max(self.tail.value(n).abs());
            let rest = decaying * (1.0 / n as f64).max(super::tail::powi(rmax, n));
            if limit + rest <= best {
                break;
            }
        }
        best
    }

    /// First index with `x_n < 0`.
    pub fn first_negative(&self) -> Result<Option<usize>> {
        if let Some(i) = self.prefix.iter().position(|&v| v < 0.0) {
            return Ok(Some(i + 1));
        }
        Ok(self.tail.scan_beyond(self.prefix.len())?.first_negative)
    }

    /// First index with `x_n <= 0`.
    pub fn first_nonpositive(&self) -> Result<Option<usize>> {
        if let Some(i) = self.prefix.iter().position(|&v| v <= 0.0) {
            return Ok(Some(i + 1));
        }
        Ok(self
            .tail
            .scan_beyond(self.prefix.len())?
            .first_nonpositive())
    }

    /// First index with `x_n == 0`.
    pub fn first_zero(&self) -> Result<Option<usize>> {
        if let Some(i) = self.prefix.iter().position(|&v| v == 0.0) {
            return Ok(Some(i + 1));
        }
        Ok(self.tail.scan_beyond(self.prefix.len())?.first_zero)
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: f64, other: &Point) -> Point {
        let m = self.prefix.len().max(other.prefix.len());
        let prefix = (1..=m)
            .map(|n| self.coordinate(n) + t * other.coordinate(n))
            .collect();
        Point {
            prefix,
            tail: self.tail.axpy(t, &other.tail),
        }
    }

    pub fn add(&self, other: &Point) -> Point {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Point) -> Point {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, lambda: f64) -> Point {
        Point::zero().axpy(lambda, self)
    }

    /// `anchor + P^k(self - anchor)`: coordinates `1..=k` from `self`, the
    /// rest from `anchor`.
    pub fn project(&self, k: usize, anchor: &Point) -> Point {
        let m = k.max(anchor.prefix.len());
        let prefix = (1..=m)
            .map(|n| {
                if n <= k {
                    self.coordinate(n)
                } else {
                    anchor.coordinate(n)
                }
            })
            .collect();
        Point {
            prefix,
            tail: anchor.tail.clone(),
        }
    }

    /// Replace coordinates `1..=y.len()` by `y`.
    pub fn with_head(&self, y: &[f64]) -> Point {
        let m = y.len().max(self.prefix.len());
        let prefix = (1..=m)
            .map(|n| {
                if n <= y.len() {
                    y[n - 1]
                } else {
                    self.coordinate(n)
                }
            })
            .collect();
        Point {
            prefix,
            tail: self.tail.clone(),
        }
    }

    /// Equality as sequences, regardless of where the prefix ends.
    pub fn seq_eq(&self, other: &Point) -> bool {
        if self.tail != other.tail {
            return false;
        }
        let m = self.prefix.len().max(other.prefix.len());
        (1..=m).all(|n| self.coordinate(n) == other.coordinate(n))
    }

    /// `Some(n)` when this point is exactly `e_n`.
    pub fn as_basis_index(&self) -> Option<usize> {
        if !self.tail.is_zero() {
            return None;
        }
        let mut found = None;
        for (i, &v) in self.prefix.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            if v != 1.0 || found.is_some() {
                return None;
            }
            found = Some(i + 1);
        }
        found
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for v in &self.prefix {
            write!(f, "{v}, ")?;
        }
        write!(f, "tail {})", self.tail)
    }
}

/// An element of the dual space, paired with points coordinate-wise.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DualPoint(Point);

impl DualPoint {
    pub fn new(p: Point) -> Self {
        DualPoint(p)
    }

    pub fn zero() -> Self {
        DualPoint::default()
    }

    /// The coordinate functional `e_n*`.
    pub fn coordinate_functional(n: usize) -> Self {
        DualPoint(Point::basis(n))
    }

    pub fn as_point(&self) -> &Point {
        &self.0
    }

    pub fn coordinate(&self, n: usize) -> f64 {
        self.0.coordinate(n)
    }

    pub fn scale(&self, lambda: f64) -> DualPoint {
        DualPoint(self.0.scale(lambda))
    }

    pub fn is_finitely_supported(&self) -> bool {
        self.0.tail().is_zero()
    }
}
