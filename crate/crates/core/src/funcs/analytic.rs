//! Closed-form coordinate derivatives `f'(x; e_n)` of grammar functions.

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::eval::check_domain;
use super::expr::FunctionExpr;
use super::scalar::{Coef, ScalarConvex};
use super::symbolic::{rational, ClosedForm};
use crate::error::Result;
use crate::seqspace::{Envelope, Point, SignPattern, SpaceDescriptor, SpaceKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AnalyticDeriv {
    Exists {
        value: f64,
    },
    NotDifferentiable {
        left: f64,
        right: f64,
    },
    /// No closed form; reserved for grammar extensions.
    Unavailable,
}

impl AnalyticDeriv {
    pub fn value(&self) -> Option<f64> {
        match self {
            AnalyticDeriv::Exists { value } => Some(*value),
            _ => None,
        }
    }
}

fn scale_sided(lambda: f64, (l, r): (f64, f64)) -> (f64, f64) {
    if lambda == 0.0 {
        // the domain restriction survives a zero factor
        let l = if l == f64::NEG_INFINITY { l } else { 0.0 };
        return (l, 0.0);
    }
    if lambda < 0.0 {
        return (lambda * r, lambda * l);
    }
    (lambda * l, lambda * r)
}

/// One-sided derivatives `(f'(x; -e_n) negated, f'(x; e_n))`, i.e. the left
/// and right derivatives of `t -> f(x + t e_n)` at `0`.
pub fn one_sided(f: &FunctionExpr, x: &Point, n: usize) -> (f64, f64) {
    match f {
        FunctionExpr::Limsup => (0.0, 0.0),
        FunctionExpr::Separable { weight, inner } => {
            scale_sided(weight.at(n), inner.one_sided(n, x.coordinate(n)))
        }
        FunctionExpr::Linear { p, .. } => {
            let v = p.coordinate(n);
            (v, v)
        }
        FunctionExpr::Sum(terms) => terms.iter().fold((0.0, 0.0), |(l, r), g| {
            let (gl, gr) = one_sided(g, x, n);
            (l + gl, r + gr)
        }),
        FunctionExpr::Scale(lambda, g) => scale_sided(*lambda, one_sided(g, x, n)),
    }
}

/// Closed-form `f'(x; e_n)`.
pub fn analytic_dir_deriv(f: &FunctionExpr, x: &Point, n: usize) -> Result<AnalyticDeriv> {
    assert!(n >= 1, "coordinate directions are indexed from 1");
    check_domain(f, x)?;
    Ok(sided_to_deriv(one_sided(f, x, n)))
}

pub(crate) fn sided_to_deriv((left, right): (f64, f64)) -> AnalyticDeriv {
    if left == right && left.is_finite() {
        AnalyticDeriv::Exists { value: left }
    } else {
        AnalyticDeriv::NotDifferentiable { left, right }
    }
}

/// Whether `f'(x; e_n)` exists for every `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Existence {
    AllExist,
    FailsAt(usize),
    Undecided,
}

pub fn tail_existence(f: &FunctionExpr, x: &Point) -> Result<Existence> {
    check_domain(f, x)?;
    let m = x.prefix_len().max(f.prefix_len());
    for n in 1..=m {
        if analytic_dir_deriv(f, x, n)?.value().is_none() {
            return Ok(Existence::FailsAt(n));
        }
    }
    if !f.has_kinks() {
        return Ok(Existence::AllExist);
    }
    // Kinks of grammar leaves sit at x_n = 0; convex kinks never cancel.
    let Ok(scan) = x.tail().scan_beyond(m) else {
        return Ok(Existence::Undecided);
    };
    match scan.first_zero {
        None => Ok(Existence::AllExist),
        Some(z) => Ok(if analytic_dir_deriv(f, x, z)?.value().is_none() {
            Existence::FailsAt(z)
        } else {
            Existence::Undecided
        }),
    }
}

/// `n -> f'(x; e_n)` as an exact closed form, valid for `n > valid_after`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeForm {
    pub form: ClosedForm,
    pub valid_after: usize,
}

fn coef_form(c: &Coef) -> Option<ClosedForm> {
    ClosedForm::from_rule(c.rule())
}

/// Exact closed form of the coordinate derivatives beyond all explicit
/// prefixes; `None` when some part has no exact form (inexact square roots,
/// undecided signs, kinks in the tail).
pub fn derivative_form(f: &FunctionExpr, x: &Point) -> Option<DerivativeForm> {
    let mut valid_after = x.prefix_len().max(f.prefix_len());
    let form = form_rec(f, x, &mut valid_after)?;
    Some(DerivativeForm { form, valid_after })
}

fn form_rec(f: &FunctionExpr, x: &Point, valid_after: &mut usize) -> Option<ClosedForm> {
    match f {
        FunctionExpr::Limsup => Some(ClosedForm::zero()),
        FunctionExpr::Linear { p, .. } => ClosedForm::from_tail(p.as_point().tail()),
        FunctionExpr::Sum(terms) => terms.iter().try_fold(ClosedForm::zero(), |acc, g| {
            Some(acc.add(&form_rec(g, x, valid_after)?))
        }),
        FunctionExpr::Scale(lambda, g) => {
            Some(form_rec(g, x, valid_after)?.scale(&rational(*lambda)?))
        }
        FunctionExpr::Separable { weight, inner } => {
            let w = coef_form(weight)?;
            if w.is_zero() {
                return (!inner.restricts_domain()).then(ClosedForm::zero);
            }
            let xs = ClosedForm::from_tail(x.tail())?;
            let two = rational(2.0)?;
            let d = match inner {
                ScalarConvex::Abs => {
                    let sign = x.tail().eventual_sign()?;
                    *valid_after = (*valid_after).max(sign.settled_after);
                    match sign.pattern {
                        SignPattern::Zero => return None,
                        SignPattern::Positive => ClosedForm::constant(BigRational::one()),
                        SignPattern::Negative => ClosedForm::constant(-BigRational::one()),
                        SignPattern::Alternating { even_positive } => {
                            let s = if even_positive { 1.0 } else { -1.0 };
                            ClosedForm::alternating().scale(&rational(s)?)
                        }
                    }
                }
                ScalarConvex::Square => xs.scale(&two),
                ScalarConvex::AffineQuad { a, b } => {
                    xs.scale(&rational(2.0 * a)?).add(&coef_form(b)?)
                }
                ScalarConvex::Linear { b } => coef_form(b)?,
                ScalarConvex::NegSqrt { c } => xs
                    .sqrt()?
                    .recip()?
                    .mul(&coef_form(c)?)
                    .scale(&rational(-0.5)?),
            };
            Some(w.mul(&d))
        }
    }
}

/// Majorant of `|f'(x; e_n)|` for `n` beyond the explicit prefixes of `x`
/// and `f`.
pub fn derivative_envelope(f: &FunctionExpr, x: &Point) -> Option<Envelope> {
    match f {
        FunctionExpr::Limsup => Some(Envelope::zero()),
        FunctionExpr::Linear { p, .. } => Some(p.as_point().tail().envelope()),
        FunctionExpr::Sum(terms) => terms.iter().try_fold(Envelope::zero(), |acc, g| {
            Some(acc.add(&derivative_envelope(g, x)?))
        }),
        FunctionExpr::Scale(lambda, g) => Some(derivative_envelope(g, x)?.scale(lambda.abs())),
        FunctionExpr::Separable { weight, inner } => {
            let w = weight.envelope();
            let inner_env = match inner {
                ScalarConvex::NegSqrt { c } => {
                    c.envelope().mul(&inverse_sqrt_envelope(x)?.scale(0.5))
                }
                _ => inner.derivative_envelope(&x.tail().envelope())?,
            };
            Some(w.mul(&inner_env))
        }
    }
}

/// Majorant of `1 / sqrt(x_n)` when the tail is a single positive monomial.
fn inverse_sqrt_envelope(x: &Point) -> Option<Envelope> {
    let monos: Vec<_> = x
        .tail()
        .monomials()
        .into_iter()
        .filter(|m| m.0 != 0.0)
        .collect();
    match monos.as_slice() {
        [(c, r, q)] if *c > 0.0 && *r > 0.0 => {
            Some(Envelope::monomial(1.0 / c.sqrt(), 1.0 / r.sqrt(), q / 2.0))
        }
        _ => None,
    }
}

/// Whether `f`, restricted to its domain, is continuous for the topology of
/// `space`.
pub fn is_continuous(f: &FunctionExpr, space: &SpaceDescriptor) -> bool {
    match f {
        FunctionExpr::Limsup => space.kind != SpaceKind::Rn,
        FunctionExpr::Linear { p, .. } => match space.kind {
            SpaceKind::Rn => p.is_finitely_supported(),
            SpaceKind::Ell1 => true,
            SpaceKind::EllInf => p.as_point().in_ell1(),
        },
        FunctionExpr::Sum(terms) => terms.iter().all(|g| is_continuous(g, space)),
        FunctionExpr::Scale(lambda, g) => *lambda == 0.0 || is_continuous(g, space),
        FunctionExpr::Separable { weight, inner } => {
            if weight.is_zero() {
                return true;
            }
            let w = weight.envelope();
            match (space.kind, inner) {
                (SpaceKind::Rn, _) => false,
                // sum w c |sqrt(s) - sqrt(t)| <= ||w c||_2 ||s - t||_1^(1/2)
                (SpaceKind::Ell1, ScalarConvex::NegSqrt { c }) => {
                    let wc = w.mul(&c.envelope());
                    wc.mul(&wc).is_summable()
                }
                // sum w c |sqrt(s) - sqrt(t)| <= (sum w c) ||s - t||_inf^(1/2)
                (SpaceKind::EllInf, ScalarConvex::NegSqrt { c }) => {
                    w.mul(&c.envelope()).is_summable()
                }
                (SpaceKind::Ell1, _) => inner
                    .lipschitz_envelope(1.0)
                    .is_some_and(|l| w.mul(&l).is_bounded()),
                (SpaceKind::EllInf, _) => inner
                    .lipschitz_envelope(1.0)
                    .is_some_and(|l| w.mul(&l).is_summable()),
            }
        }
    }
}
