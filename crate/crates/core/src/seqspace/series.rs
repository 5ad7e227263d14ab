//! Certified summation of sequence-space series.
//!
//! A series is given as a [`TermRule`]: an explicit term evaluator plus an
//! analytic majorant ([`Envelope`]) of the terms beyond some index. The
//! evaluator sums enough terms for the majorant's tail to fall under half the
//! tolerance and budgets the other half for floating-point rounding.

use serde::{Deserialize, Serialize};

use super::point::{DualPoint, Point};
use crate::error::{Error, Result};

pub const DEFAULT_SERIES_TOL: f64 = 1e-12;

/// Upper limit on explicitly summed terms.
pub const MAX_TERMS: usize = 4_000_000;

/// Ratios this close to 1 are products of ratios that are exactly
/// reciprocal in real arithmetic.
const UNIT_SNAP: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub error_bound: f64,
    pub terms_used: usize,
}

impl SeriesValue {
    pub fn exact(value: f64) -> Self {
        SeriesValue {
            value,
            error_bound: 0.0,
            terms_used: 0,
        }
    }
}

/// One majorant term `c * rho^n * n^(-p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvTerm {
    pub c: f64,
    pub rho: f64,
    pub p: f64,
}

impl EnvTerm {
    fn at(&self, n: f64) -> f64 {
        self.c * (n * self.rho.ln() - self.p * n.ln()).exp()
    }

    fn summable(&self) -> bool {
        self.rho < 1.0 || (self.rho == 1.0 && self.p > 1.0)
    }

    /// Bound on `sum_{n > k}` of this term, if one is available at this `k`.
    fn tail_bound(&self, k: usize) -> Option<f64> {
        if self.rho < 1.0 {
            let first = self.at((k + 1) as f64);
            if first == 0.0 {
                return Some(0.0);
            }
            // ratio of consecutive terms for n >= k+1
            let growth = if self.p >= 0.0 {
                1.0
            } else {
                (1.0 + 1.0 / (k + 1) as f64).powf(-self.p)
            };
            let q = self.rho * growth;
            (q < 1.0).then(|| first / (1.0 - q))
        } else if self.rho == 1.0 && self.p > 1.0 {
            let p = self.p;
            Some(if k == 0 {
                self.c * p / (p - 1.0)
            } else {
                self.c * (k as f64).powf(1.0 - p) / (p - 1.0)
            })
        } else {
            None
        }
    }
}

/// Majorant `sum_i c_i * rho_i^n * n^(-p_i)` of the absolute value of a
/// sequence, with `c_i, rho_i >= 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Envelope {
    terms: Vec<EnvTerm>,
}

impl Envelope {
    pub fn zero() -> Self {
        Envelope::default()
    }

    pub fn constant(c: f64) -> Self {
        Envelope::monomial(c, 1.0, 0.0)
    }

    pub fn monomial(c: f64, rho: f64, p: f64) -> Self {
        let mut env = Envelope::zero();
        env.push(EnvTerm { c, rho, p });
        env
    }

    pub fn terms(&self) -> &[EnvTerm] {
        &self.terms
    }

    fn push(&mut self, mut term: EnvTerm) {
        debug_assert!(term.c >= 0.0 && term.rho >= 0.0);
        if term.c == 0.0 || term.rho == 0.0 {
            return;
        }
        if (term.rho - 1.0).abs() <= UNIT_SNAP {
            term.rho = 1.0;
        }
        if let Some(t) = self
            .terms
            .iter_mut()
            .find(|t| t.rho == term.rho && t.p == term.p)
        {
            t.c += term.c;
        } else {
            self.terms.push(term);
        }
    }

    pub fn add(&self, other: &Envelope) -> Envelope {
        let mut out = self.clone();
        for &t in &other.terms {
            out.push(t);
        }
        out
    }

    pub fn scale(&self, k: f64) -> Envelope {
        let k = k.abs();
        let mut out = Envelope::zero();
        for &t in &self.terms {
            out.push(EnvTerm { c: t.c * k, ..t });
        }
        out
    }

    pub fn mul(&self, other: &Envelope) -> Envelope {
        let mut out = Envelope::zero();
        for a in &self.terms {
            for b in &other.terms {
                out.push(EnvTerm {
                    c: a.c * b.c,
                    rho: a.rho * b.rho,
                    p: a.p + b.p,
                });
            }
        }
        out
    }

    /// Majorant of the square root, using `sqrt(sum) <= sum sqrt`.
    pub fn sqrt(&self) -> Envelope {
        let mut out = Envelope::zero();
        for &t in &self.terms {
            out.push(EnvTerm {
                c: t.c.sqrt(),
                rho: t.rho.sqrt(),
                p: t.p / 2.0,
            });
        }
        out
    }

    pub fn at(&self, n: usize) -> f64 {
        self.terms.iter().map(|t| t.at(n as f64)).sum()
    }

    /// Whether the majorant stays bounded in `n`.
    pub fn is_bounded(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.rho < 1.0 || (t.rho == 1.0 && t.p >= 0.0))
    }

    pub fn is_summable(&self) -> bool {
        self.terms.iter().all(EnvTerm::summable)
    }

    /// Bound on `sum_{n > k}` of the majorant.
    pub fn tail_bound(&self, k: usize) -> Option<f64> {
        self.terms
            .iter()
            .map(|t| t.tail_bound(k))
            .try_fold(0.0, |acc, b| b.map(|b| acc + b))
    }

    /// Smallest explicitly summed prefix (at least `start`) after which the
    /// tail bound is below `target`.
    pub fn terms_needed(&self, start: usize, target: f64) -> Result<usize> {
        if !self.is_summable() {
            return Err(Error::NoMajorant);
        }
        let mut k = start;
        loop {
            if let Some(b) = self.tail_bound(k) {
                if b <= target {
                    return Ok(k);
                }
            }
            if k >= MAX_TERMS {
                return Err(Error::ToleranceUnreachable {
                    target,
                    achieved: self.tail_bound(k).unwrap_or(f64::INFINITY),
                    terms: k,
                });
            }
            k = (k + 8 + k / 4).min(MAX_TERMS);
        }
    }
}

/// A series `sum_{n >= 1} term(n)` whose terms beyond [`TermRule::start`] are
/// majorized by [`TermRule::envelope`].
pub trait TermRule {
    /// The `n`-th term. `+inf` is allowed and makes the whole sum `+inf`.
    fn term(&self, n: usize) -> Result<f64>;

    /// The term together with the magnitude that scales its rounding error.
    fn term_with_magnitude(&self, n: usize) -> Result<(f64, f64)> {
        let v = self.term(n)?;
        Ok((v, v.abs()))
    }

    fn start(&self) -> usize;

    /// Majorant of `|term(n)|` for `n > start()`; `None` when no closed-form
    /// majorant is available.
    fn envelope(&self) -> Option<Envelope>;
}

/// Raw outcome of a certified summation, before rounding is folded into the
/// error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub tail_bound: f64,
    /// `sum |term(n)|` over the summed terms; scales the rounding error.
    pub magnitude: f64,
    pub terms_used: usize,
}

impl SeriesSum {
    pub fn rounding_bound(&self) -> f64 {
        8.0 * f64::EPSILON * self.magnitude
    }

    pub fn to_value(self) -> SeriesValue {
        SeriesValue {
            value: self.value,
            error_bound: self.tail_bound + self.rounding_bound(),
            terms_used: self.terms_used,
        }
    }
}

/// Neumaier-compensated sum of `term(1..=k)` plus the majorant's tail bound.
pub fn sum_prefix<R: TermRule + ?Sized>(rule: &R, k: usize, env: &Envelope) -> Result<SeriesSum> {
    let tail_bound = env.tail_bound(k).ok_or(Error::NoMajorant)?;
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    let mut magnitude = 0.0_f64;
    for n in 1..=k {
        let (v, mag) = rule.term_with_magnitude(n)?;
        if v == f64::INFINITY {
            return Ok(SeriesSum {
                value: f64::INFINITY,
                tail_bound: 0.0,
                magnitude: f64::INFINITY,
                terms_used: n,
            });
        }
        magnitude += mag;
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    Ok(SeriesSum {
        value: sum + comp,
        tail_bound,
        magnitude,
        terms_used: k,
    })
}

/// Sum with the tail bound brought under `tol / 2`.
pub fn certified_sum<R: TermRule + ?Sized>(rule: &R, tol: f64) -> Result<SeriesSum> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Invalid(format!(
            "series tolerance must be positive, got {tol}"
        )));
    }
    let env = rule.envelope().ok_or(Error::NoMajorant)?;
    let k = env.terms_needed(rule.start(), tol / 2.0)?;
    sum_prefix(rule, k, &env)
}

/// Certified value of `sum_{n >= 1} term(n)` with `|value - sum| <= error_bound`.
pub fn certified_series<R: TermRule + ?Sized>(rule: &R, tol: f64) -> Result<SeriesValue> {
    let sum = certified_sum(rule, tol)?;
    if sum.value.is_infinite() {
        return Err(Error::DomainViolation("series term is +inf".into()));
    }
    Ok(sum.to_value())
}

/// Same as [`certified_series`] but with exactly `k` explicit terms (at least
/// the rule's start); the error bound is whatever the majorant gives at `k`.
pub fn series_with_terms<R: TermRule + ?Sized>(rule: &R, k: usize) -> Result<SeriesValue> {
    let env = rule.envelope().ok_or(Error::NoMajorant)?;
    if !env.is_summable() {
        return Err(Error::NoMajorant);
    }
    Ok(sum_prefix(rule, k.max(rule.start()), &env)?.to_value())
}

/// Term rule given by closures; handy for ad-hoc series.
pub struct FnTerms<F> {
    pub term: F,
    pub start: usize,
    pub envelope: Option<Envelope>,
}

impl<F: Fn(usize) -> Result<f64>> TermRule for FnTerms<F> {
    fn term(&self, n: usize) -> Result<f64> {
        (self.term)(n)
    }

    fn start(&self) -> usize {
        self.start
    }

    fn envelope(&self) -> Option<Envelope> {
        self.envelope.clone()
    }
}

/// Pairing `<p, x> = sum p_n x_n`, certified absolutely convergent from the
/// tails.
pub fn pair(p: &DualPoint, x: &Point, tol: f64) -> Result<SeriesValue> {
    let p = p.as_point();
    let env = p.tail().envelope().mul(&x.tail().envelope());
    if !env.is_summable() {
        return Err(Error::NonConvergentPairing);
    }
    let rule = FnTerms {
        term: |n| Ok(p.coordinate(n) * x.coordinate(n)),
        start: p.prefix_len().max(x.prefix_len()),
        envelope: Some(env),
    };
    certified_series(&rule, tol)
}

/// Frechet metric of the space of all real sequences:
/// `d(x, y) = sum 2^-n |x_n - y_n| / (1 + |x_n - y_n|)`.
pub fn metric_rn(x: &Point, y: &Point, tol: f64) -> Result<SeriesValue> {
    let d = x.sub(y);
    let rule = FnTerms {
        term: |n| {
            let a = d.coordinate(n).abs();
            Ok(0.5_f64.powi(n.min(i32::MAX as usize) as i32) * a / (1.0 + a))
        },
        start: 0,
        envelope: Some(Envelope::monomial(1.0, 0.5, 0.0)),
    };
    certified_series(&rule, tol)
}

/// `sum |x_n|`.
pub fn l1_norm(x: &Point, tol: f64) -> Result<SeriesValue> {
    let rule = FnTerms {
        term: |n| Ok(x.coordinate(n).abs()),
        start: x.prefix_len(),
        envelope: Some(x.tail().envelope()),
    };
    certified_series(&rule, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqspace::TailRule;

    #[test]
    fn geometric_tail_bound_is_exact_for_pure_geometric() {
        let env = Envelope::monomial(1.0, 0.5, 0.0);
        // sum_{n > 3} 0.5^n = 0.5^3
        assert!((env.tail_bound(3).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn polynomial_tail_bound() {
        let env = Envelope::monomial(1.0, 1.0, 2.0);
        // sum_{n > 10} n^-2 < 1/10
        let b = env.tail_bound(10).unwrap();
        let brute: f64 = (11..2_000_000).map(|n| 1.0 / (n as f64).powi(2)).sum();
        assert!(b >= brute && b <= 0.1 + 1e-15);
    }

    #[test]
    fn growing_polynomial_factor_still_bounded() {
        // sum n^2 0.5^n
        let env = Envelope::monomial(1.0, 0.5, -2.0);
        assert!(env.tail_bound(0).is_none() || env.tail_bound(0).unwrap() > 0.0);
        let b = env.tail_bound(20).unwrap();
        let brute: f64 = (21..400).map(|n| (n as f64).powi(2) * 0.5f64.powi(n)).sum();
        assert!(b >= brute);
    }

    #[test]
    fn non_summable_envelopes() {
        assert!(!Envelope::constant(1.0).is_summable());
        assert!(!Envelope::monomial(1.0, 1.0, 1.0).is_summable());
        assert!(Envelope::zero().is_summable());
        assert_eq!(
            Envelope::constant(1.0).terms_needed(0, 1e-12),
            Err(Error::NoMajorant)
        );
    }

    #[test]
    fn reciprocal_ratios_snap_to_one() {
        let a = Envelope::monomial(1.0, 0.3, 0.0);
        let b = Envelope::monomial(1.0, 1.0 / 0.3, 0.0);
        let prod = a.mul(&b);
        assert_eq!(prod.terms()[0].rho, 1.0);
    }

    #[test]
    fn pairing_examples() {
        let e2 = DualPoint::new(Point::new(vec![0.0, 1.0], crate::seqspace::Tail::zero()).unwrap());
        let x = Point::from_rule(vec![3.0, 7.0, 9.0], TailRule::Harmonic(1.0));
        assert_eq!(pair(&e2, &x, 1e-12).unwrap().value, 7.0);

        let ones = DualPoint::new(Point::from_rule(vec![], TailRule::Const(1.0)));
        let g = Point::from_rule(vec![], TailRule::Geometric(1.0, 0.5));
        let v = pair(&ones, &g, 1e-12).unwrap();
        assert!((v.value - 1.0).abs() <= 1e-12);
        assert!(v.error_bound <= 1e-12);

        let c = Point::from_rule(vec![], TailRule::Const(1.0));
        assert_eq!(pair(&ones, &c, 1e-12), Err(Error::NonConvergentPairing));
    }

    #[test]
    fn metric_examples() {
        let x = Point::from_rule(vec![1.0, -2.0], TailRule::Harmonic(3.0));
        assert_eq!(metric_rn(&x, &x, 1e-12).unwrap().value, 0.0);
        let d = metric_rn(&Point::zero(), &Point::basis(1), 1e-12).unwrap();
        assert!((d.value - 0.25).abs() <= 1e-12);
    }

    #[test]
    fn metric_of_projection_decreases_to_zero() {
        let x = Point::from_rule(vec![5.0], TailRule::Const(3.0));
        let mut prev = f64::INFINITY;
        for k in [1, 2, 4, 8, 16, 32, 48] {
            let d = metric_rn(&x.project(k, &Point::zero()), &x, 1e-14)
                .unwrap()
                .value;
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 1e-12);
    }
}
