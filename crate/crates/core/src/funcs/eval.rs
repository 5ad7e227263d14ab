//! Certified evaluation of grammar functions and of their increments
//! `f(x + t h) - f(x)`.

use super::expr::FunctionExpr;
use super::scalar::{Coef, ScalarConvex};
use crate::error::{Error, Result};
use crate::seqspace::{certified_sum, Envelope, Point, SeriesSum, SeriesValue, TermRule};

struct MagTerms<F> {
    term: F,
    start: usize,
    envelope: Envelope,
}

impl<F: Fn(usize) -> (f64, f64)> TermRule for MagTerms<F> {
    fn term(&self, n: usize) -> Result<f64> {
        Ok((self.term)(n).0)
    }

    fn term_with_magnitude(&self, n: usize) -> Result<(f64, f64)> {
        Ok((self.term)(n))
    }

    fn start(&self) -> usize {
        self.start
    }

    fn envelope(&self) -> Option<Envelope> {
        Some(self.envelope.clone())
    }
}

fn exact(value: f64, magnitude: f64) -> SeriesSum {
    SeriesSum {
        value,
        tail_bound: 0.0,
        magnitude,
        terms_used: 0,
    }
}

fn infinite() -> SeriesSum {
    exact(f64::INFINITY, f64::INFINITY)
}

fn add_sums(a: SeriesSum, b: SeriesSum) -> SeriesSum {
    SeriesSum {
        value: a.value + b.value,
        tail_bound: a.tail_bound + b.tail_bound,
        magnitude: a.magnitude + b.magnitude,
        terms_used: a.terms_used.max(b.terms_used),
    }
}

fn scale_sum(lambda: f64, s: SeriesSum) -> SeriesSum {
    if s.value.is_infinite() {
        return s;
    }
    SeriesSum {
        value: lambda * s.value,
        tail_bound: lambda * s.tail_bound,
        magnitude: lambda * s.magnitude,
        terms_used: s.terms_used,
    }
}

/// First index at which `x` leaves the domain of `f`, if any.
pub fn domain_violation(f: &FunctionExpr, x: &Point) -> Result<Option<usize>> {
    let mut restricted = false;
    f.for_each_leaf(|_, leaf| {
        if let FunctionExpr::Separable { inner, .. } = leaf {
            restricted |= inner.restricts_domain();
        }
    });
    if !restricted {
        return Ok(None);
    }
    // Every domain restriction in the grammar is `x_n >= 0`.
    if let Some(i) = x.prefix().iter().position(|&v| v < 0.0) {
        return Ok(Some(i + 1));
    }
    let scan = x.tail().scan_beyond(x.prefix_len())?;
    Ok(scan.first_negative)
}

pub fn check_domain(f: &FunctionExpr, x: &Point) -> Result<()> {
    match domain_violation(f, x)? {
        None => Ok(()),
        Some(n) => Err(Error::DomainViolation(format!(
            "coordinate {n} = {} is outside the domain of {f}",
            x.coordinate(n)
        ))),
    }
}

/// `f(x)` with a certified error bound.
pub fn evaluate(f: &FunctionExpr, x: &Point, tol: f64) -> Result<SeriesValue> {
    check_domain(f, x)?;
    Ok(evaluate_sum(f, x, tol)?.to_value())
}

/// Like [`evaluate`] but with `+inf` outside the domain.
pub fn evaluate_ext(f: &FunctionExpr, x: &Point, tol: f64) -> Result<SeriesValue> {
    match evaluate(f, x, tol) {
        Err(Error::DomainViolation(_)) => Ok(SeriesValue::exact(f64::INFINITY)),
        other => other,
    }
}

/// Raw certified sum for `f(x)`; `x` must lie in the domain.
pub fn evaluate_sum(f: &FunctionExpr, x: &Point, tol: f64) -> Result<SeriesSum> {
    match f {
        FunctionExpr::Limsup => {
            let v = x.tail().limsup_abs();
            Ok(exact(v, v))
        }
        FunctionExpr::Separable { weight, inner } => separable_sum(weight, inner, x, tol),
        FunctionExpr::Linear { p, offset } => {
            let p = p.as_point();
            let envelope = p.tail().envelope().mul(&x.tail().envelope());
            if !envelope.is_summable() {
                return Err(Error::NonConvergentPairing);
            }
            let rule = MagTerms {
                term: |n| {
                    let v = p.coordinate(n) * x.coordinate(n);
                    (v, v.abs())
                },
                start: p.prefix_len().max(x.prefix_len()),
                envelope,
            };
            let s = certified_sum(&rule, tol)?;
            Ok(add_sums(s, exact(*offset, offset.abs())))
        }
        FunctionExpr::Sum(terms) => {
            let share = tol / terms.len().max(1) as f64;
            terms.iter().try_fold(exact(0.0, 0.0), |acc, g| {
                Ok(add_sums(acc, evaluate_sum(g, x, share)?))
            })
        }
        FunctionExpr::Scale(lambda, g) => {
            if *lambda == 0.0 {
                return Ok(exact(0.0, 0.0));
            }
            Ok(scale_sum(*lambda, evaluate_sum(g, x, tol / lambda.abs())?))
        }
    }
}

fn separable_sum(weight: &Coef, inner: &ScalarConvex, x: &Point, tol: f64) -> Result<SeriesSum> {
    let envelope = weight
        .envelope()
        .mul(&inner.value_envelope(&x.tail().envelope()));
    let rule = MagTerms {
        term: |n| {
            let w = weight.at(n);
            match inner.value(n, x.coordinate(n)) {
                Some(v) => (w * v, (w * v).abs()),
                None => (f64::INFINITY, f64::INFINITY),
            }
        },
        start: x.prefix_len(),
        envelope,
    };
    certified_sum(&rule, tol)
}

/// `f(x + t h) - f(x)` computed term by term without cancellation. The value
/// is `+inf` when `x + t h` leaves the domain; `x` itself must be inside.
pub fn increment(f: &FunctionExpr, x: &Point, t: f64, h: &Point, tol: f64) -> Result<SeriesSum> {
    if t == 0.0 {
        return Ok(exact(0.0, 0.0));
    }
    let y = x.axpy(t, h);
    if domain_violation(f, &y)?.is_some() {
        return Ok(infinite());
    }
    increment_in_domain(f, x, t, h, &y, tol)
}

fn increment_in_domain(
    f: &FunctionExpr,
    x: &Point,
    t: f64,
    h: &Point,
    y: &Point,
    tol: f64,
) -> Result<SeriesSum> {
    match f {
        FunctionExpr::Limsup => {
            let a = x.tail().limsup_abs();
            let b = y.tail().limsup_abs();
            Ok(exact(b - a, a + b))
        }
        FunctionExpr::Separable { weight, inner } => {
            let d_env = h.tail().envelope().scale(t);
            let envelope = weight
                .envelope()
                .mul(&inner.increment_envelope(&x.tail().envelope(), &d_env));
            let rule = MagTerms {
                term: |n| {
                    let w = weight.at(n);
                    match inner.increment(n, x.coordinate(n), t * h.coordinate(n)) {
                        Some((v, m)) => (w * v, w * m),
                        None => (f64::INFINITY, f64::INFINITY),
                    }
                },
                start: x.prefix_len().max(h.prefix_len()),
                envelope,
            };
            certified_sum(&rule, tol)
        }
        FunctionExpr::Linear { p, .. } => {
            let p = p.as_point();
            let envelope = p.tail().envelope().mul(&h.tail().envelope()).scale(t);
            if !envelope.is_summable() {
                return Err(Error::NonConvergentPairing);
            }
            let rule = MagTerms {
                term: |n| {
                    let v = p.coordinate(n) * (t * h.coordinate(n));
                    (v, v.abs())
                },
                start: p.prefix_len().max(h.prefix_len()),
                envelope,
            };
            certified_sum(&rule, tol)
        }
        FunctionExpr::Sum(terms) => {
            let share = tol / terms.len().max(1) as f64;
            let mut acc = exact(0.0, 0.0);
            for g in terms {
                let s = increment_in_domain(g, x, t, h, y, share)?;
                if s.value == f64::INFINITY {
                    return Ok(s);
                }
                acc = add_sums(acc, s);
            }
            Ok(acc)
        }
        FunctionExpr::Scale(lambda, g) => {
            if *lambda == 0.0 {
                return Ok(exact(0.0, 0.0));
            }
            Ok(scale_sum(
                *lambda,
                increment_in_domain(g, x, t, h, y, tol / lambda.abs())?,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::expr::{
        example3_objective, example4_objective, example5_objective, l1_norm, scale,
    };
    use crate::seqspace::TailRule;

    #[test]
    fn limsup_reads_tail_only() {
        let f = FunctionExpr::Limsup;
        for rule in [
            TailRule::Harmonic(0.5),
            TailRule::Geometric(3.0, 0.5),
            TailRule::Zero,
        ] {
            let x = Point::from_rule(vec![7.0, -9.0], rule);
            assert_eq!(evaluate(&f, &x, 1e-12).unwrap().value, 0.0);
        }
        assert_eq!(
            evaluate(&f, &Point::constant(1.0), 1e-12).unwrap().value,
            1.0
        );
    }

    #[test]
    fn example3_value_at_minimizer() {
        // -(1/4) sum 2^-n / n^2, computed by direct summation to 200 terms
        let oracle: f64 = -(1..200)
            .map(|n| 0.5f64.powi(n) / (n as f64 * n as f64))
            .sum::<f64>()
            / 4.0;
        let f = example3_objective(0.5).unwrap();
        let x = Point::from_rule(vec![], TailRule::Harmonic(0.5));
        let v = evaluate(&f, &x, 1e-12).unwrap();
        assert!((v.value - oracle).abs() <= 1e-12);
        assert!((v.value - (-0.145560)).abs() < 1e-6);
    }

    #[test]
    fn example4_value_at_minimizer() {
        let f = example4_objective(0.5).unwrap();
        let x = Point::from_rule(vec![], TailRule::Geometric(1.0, 0.25));
        let v = evaluate(&f, &x, 1e-12).unwrap();
        assert!((v.value + 1.0 / 3.0).abs() <= 1e-9);
    }

    #[test]
    fn example5_values() {
        let g = example5_objective(0.5).unwrap();
        let one = evaluate(&g, &Point::constant(1.0), 1e-12).unwrap().value;
        let half = evaluate(&g, &Point::constant(0.5), 1e-12).unwrap().value;
        assert!(one.abs() <= 1e-9);
        assert!((half + 0.25).abs() <= 1e-9);
    }

    #[test]
    fn weighted_zero_series() {
        let f = crate::funcs::expr::weighted_square(0.5).unwrap();
        assert_eq!(evaluate(&f, &Point::zero(), 1e-12).unwrap().value, 0.0);
    }

    #[test]
    fn geometric_constant_series() {
        // sum beta^(2n) * (-1) at beta = 1/2
        let f = FunctionExpr::separable(
            TailRule::Geometric(1.0, 0.25),
            ScalarConvex::Linear { b: Coef::Num(-1.0) },
        )
        .unwrap();
        let v = evaluate(&f, &Point::constant(1.0), 1e-12).unwrap();
        assert!((v.value + 1.0 / 3.0).abs() <= 1e-9);
    }

    #[test]
    fn scaled_norm() {
        let f = scale(2.0, l1_norm()).unwrap();
        assert_eq!(evaluate(&f, &Point::basis(1), 1e-12).unwrap().value, 2.0);
    }

    #[test]
    fn ell1_norm_of_constant_has_no_majorant() {
        assert_eq!(
            evaluate(&l1_norm(), &Point::constant(1.0), 1e-12),
            Err(Error::NoMajorant)
        );
    }

    #[test]
    fn domain_violations() {
        let f = example4_objective(0.5).unwrap();
        let x = Point::from_rule(vec![0.1, -0.1], TailRule::Zero);
        assert!(matches!(
            evaluate(&f, &x, 1e-12),
            Err(Error::DomainViolation(_))
        ));
        assert_eq!(evaluate_ext(&f, &x, 1e-12).unwrap().value, f64::INFINITY);
        let y = Point::from_rule(vec![], TailRule::Geometric(-1.0, 0.5));
        assert_eq!(domain_violation(&f, &y).unwrap(), Some(1));
    }

    #[test]
    fn increments_agree_with_differences() {
        let f = example3_objective(0.5).unwrap();
        let x = Point::from_rule(vec![0.3], TailRule::Harmonic(0.5));
        let h = Point::from_rule(vec![1.0, -2.0], TailRule::Geometric(1.0, 0.5));
        for t in [0.5, 1e-3, -0.25] {
            let inc = increment(&f, &x, t, &h, 1e-13).unwrap().value;
            let direct = evaluate(&f, &x.axpy(t, &h), 1e-13).unwrap().value
                - evaluate(&f, &x, 1e-13).unwrap().value;
            assert!((inc - direct).abs() < 1e-11, "t = {t}");
        }
    }

    #[test]
    fn increment_leaving_domain_is_infinite() {
        let f = example4_objective(0.5).unwrap();
        let x = Point::from_rule(vec![], TailRule::Geometric(1.0, 0.25));
        let inc = increment(&f, &x, -1.0, &Point::basis(1), 1e-12).unwrap();
        assert_eq!(inc.value, f64::INFINITY);
    }
}
