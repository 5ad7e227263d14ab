use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqspace::{Envelope, Tail, TailRule};

/// A per-index coefficient: a plain number or a closed-form rule in `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coef {
    Num(f64),
    Rule(TailRule),
}

impl Coef {
    pub fn at(&self, n: usize) -> f64 {
        match self {
            Coef::Num(c) => *c,
            Coef::Rule(r) => r.value(n),
        }
    }

    pub fn rule(&self) -> TailRule {
        match *self {
            Coef::Num(c) => TailRule::Const(c),
            Coef::Rule(r) => r,
        }
    }

    pub fn tail(&self) -> Tail {
        Tail::from_rule(self.rule())
    }

    pub fn envelope(&self) -> Envelope {
        self.rule().envelope()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.rule().is_nonnegative()
    }

    pub fn is_zero(&self) -> bool {
        self.rule().is_zero()
    }

    fn validate(&self, what: &str) -> Result<()> {
        if let Coef::Num(c) = self {
            if !c.is_finite() {
                return Err(Error::Invalid(format!("{what} must be finite, got {c}")));
            }
        }
        Ok(())
    }
}

impl From<f64> for Coef {
    fn from(c: f64) -> Self {
        Coef::Num(c)
    }
}

impl From<TailRule> for Coef {
    fn from(r: TailRule) -> Self {
        Coef::Rule(r)
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coef::Num(c) => write!(f, "{c}"),
            Coef::Rule(r) => write!(f, "({r})"),
        }
    }
}

/// Convex scalar function `u_n` applied to the `n`-th coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScalar", into = "RawScalar")]
pub enum ScalarConvex {
    /// `|t|`
    Abs,
    /// `t^2`
    Square,
    /// `a t^2 + b_n t`, `a >= 0`
    AffineQuad { a: f64, b: Coef },
    /// `-c_n sqrt(t)` on `t >= 0`, `c_n >= 0`
    NegSqrt { c: Coef },
    /// `b_n t`
    Linear { b: Coef },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawScalar {
    Abs {},
    Square {},
    AffineQuad { a: f64, b: Coef },
    NegSqrt { c: Coef },
    Linear { b: Coef },
}

impl TryFrom<RawScalar> for ScalarConvex {
    type Error = Error;

    fn try_from(raw: RawScalar) -> Result<Self> {
        let s = match raw {
            RawScalar::Abs {} => ScalarConvex::Abs,
            RawScalar::Square {} => ScalarConvex::Square,
            RawScalar::AffineQuad { a, b } => ScalarConvex::AffineQuad { a, b },
            RawScalar::NegSqrt { c } => ScalarConvex::NegSqrt { c },
            RawScalar::Linear { b } => ScalarConvex::Linear { b },
        };
        s.validate()?;
        Ok(s)
    }
}

impl From<ScalarConvex> for RawScalar {
    fn from(s: ScalarConvex) -> Self {
        match s {
            ScalarConvex::Abs => RawScalar::Abs {},
            ScalarConvex::Square => RawScalar::Square {},
            ScalarConvex::AffineQuad { a, b } => RawScalar::AffineQuad { a, b },
            ScalarConvex::NegSqrt { c } => RawScalar::NegSqrt { c },
            ScalarConvex::Linear { b } => RawScalar::Linear { b },
        }
    }
}

/// Value, or `None` outside the domain.
pub(crate) type Ext = Option<f64>;

impl ScalarConvex {
    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarConvex::Abs | ScalarConvex::Square => Ok(()),
            ScalarConvex::AffineQuad { a, b } => {
                if !(a.is_finite() && *a >= 0.0) {
                    return Err(Error::Invalid(format!(
                        "affine_quad needs a finite a >= 0, got {a}"
                    )));
                }
                b.validate("affine_quad b")
            }
            ScalarConvex::NegSqrt { c } => {
                c.validate("neg_sqrt c")?;
                if !c.is_nonnegative() {
                    return Err(Error::Invalid(format!(
                        "neg_sqrt needs c_n >= 0 for every n, got {c}"
                    )));
                }
                Ok(())
            }
            ScalarConvex::Linear { b } => b.validate("linear b"),
        }
    }

    /// Whether the domain is a proper subset of the real line.
    pub fn restricts_domain(&self) -> bool {
        matches!(self, ScalarConvex::NegSqrt { .. })
    }

    /// Whether the function can have a kink (unequal one-sided derivatives).
    pub fn has_kinks(&self) -> bool {
        matches!(self, ScalarConvex::Abs | ScalarConvex::NegSqrt { .. })
    }

    pub fn in_domain(&self, t: f64) -> bool {
        !self.restricts_domain() || t >= 0.0
    }

    pub fn value(&self, n: usize, t: f64) -> Ext {
        Some(match self {
            ScalarConvex::Abs => t.abs(),
            ScalarConvex::Square => t * t,
            ScalarConvex::AffineQuad { a, b } => a * t * t + b.at(n) * t,
            ScalarConvex::NegSqrt { c } => {
                if t < 0.0 {
                    return None;
                }
                -c.at(n) * t.sqrt()
            }
            ScalarConvex::Linear { b } => b.at(n) * t,
        })
    }

    /// `u(t + d) - u(t)` without cancellation, with the magnitude that scales
    /// its rounding error. `None` when `t + d` leaves the domain.
    pub fn increment(&self, n: usize, t: f64, d: f64) -> Option<(f64, f64)> {
        if d == 0.0 {
            return Some((0.0, 0.0));
        }
        let s = t + d;
        Some(match self {
            ScalarConvex::Abs => {
                if t > 0.0 && s >= 0.0 {
                    (d, d.abs())
                } else if t < 0.0 && s <= 0.0 {
                    (-d, d.abs())
                } else {
                    let v = s.abs() - t.abs();
                    (v, d.abs())
                }
            }
            ScalarConvex::Square => {
                let v = (2.0 * t + d) * d;
                (v, v.abs())
            }
            ScalarConvex::AffineQuad { a, b } => {
                let q = a * (2.0 * t + d) * d;
                let l = b.at(n) * d;
                (q + l, q.abs() + l.abs())
            }
            ScalarConvex::NegSqrt { c } => {
                if s < 0.0 || t < 0.0 {
                    return None;
                }
                let v = -c.at(n) * d / (s.sqrt() + t.sqrt());
                (v, v.abs())
            }
            ScalarConvex::Linear { b } => {
                let v = b.at(n) * d;
                (v, v.abs())
            }
        })
    }

    /// One-sided derivatives `(left, right)` at `t` in the domain.
    pub fn one_sided(&self, n: usize, t: f64) -> (f64, f64) {
        match self {
            ScalarConvex::Abs => {
                if t > 0.0 {
                    (1.0, 1.0)
                } else if t < 0.0 {
                    (-1.0, -1.0)
                } else {
                    (-1.0, 1.0)
                }
            }
            ScalarConvex::Square => (2.0 * t, 2.0 * t),
            ScalarConvex::AffineQuad { a, b } => {
                let v = 2.0 * a * t + b.at(n);
                (v, v)
            }
            ScalarConvex::NegSqrt { c } => {
                let c = c.at(n);
                if t > 0.0 {
                    let v = -c / (2.0 * t.sqrt());
                    (v, v)
                } else {
                    // left of the domain boundary the function is +inf
                    (
                        f64::NEG_INFINITY,
                        if c > 0.0 { f64::NEG_INFINITY } else { 0.0 },
                    )
                }
            }
            ScalarConvex::Linear { b } => {
                let v = b.at(n);
                (v, v)
            }
        }
    }

    /// Majorant of `|u_n(x_n)|` given a majorant of `|x_n|`.
    pub fn value_envelope(&self, x: &Envelope) -> Envelope {
        match self {
            ScalarConvex::Abs => x.clone(),
            ScalarConvex::Square => x.mul(x),
            ScalarConvex::AffineQuad { a, b } => x.mul(x).scale(*a).add(&b.envelope().mul(x)),
            ScalarConvex::NegSqrt { c } => c.envelope().mul(&x.sqrt()),
            ScalarConvex::Linear { b } => b.envelope().mul(x),
        }
    }

    /// Majorant of `|u_n(x_n + d_n) - u_n(x_n)|` given majorants of `|x_n|`
    /// and `|d_n|`.
    pub fn increment_envelope(&self, x: &Envelope, d: &Envelope) -> Envelope {
        match self {
            ScalarConvex::Abs => d.clone(),
            ScalarConvex::Square => x.scale(2.0).add(d).mul(d),
            ScalarConvex::AffineQuad { a, b } => x
                .scale(2.0)
                .add(d)
                .mul(d)
                .scale(*a)
                .add(&b.envelope().mul(d)),
            // |sqrt(s) - sqrt(t)| <= sqrt(|s - t|)
            ScalarConvex::NegSqrt { c } => c.envelope().mul(&d.sqrt()),
            ScalarConvex::Linear { b } => b.envelope().mul(d),
        }
    }

    /// Majorant of `|u_n'(x_n)|` over points whose coordinates are majorized
    /// by `x`; `None` when the derivative is unbounded near zero.
    pub fn derivative_envelope(&self, x: &Envelope) -> Option<Envelope> {
        match self {
            ScalarConvex::Abs => Some(Envelope::constant(1.0)),
            ScalarConvex::Square => Some(x.scale(2.0)),
            ScalarConvex::AffineQuad { a, b } => Some(x.scale(2.0 * a).add(&b.envelope())),
            ScalarConvex::NegSqrt { .. } => None,
            ScalarConvex::Linear { b } => Some(b.envelope()),
        }
    }

    /// Lipschitz-type modulus on bounded sets, used for continuity checks:
    /// `|u_n(s) - u_n(t)| <= L_n * |s - t|` when `|s|, |t| <= radius`.
    pub fn lipschitz_envelope(&self, radius: f64) -> Option<Envelope> {
        match self {
            ScalarConvex::Abs => Some(Envelope::constant(1.0)),
            ScalarConvex::Square => Some(Envelope::constant(2.0 * radius)),
            ScalarConvex::AffineQuad { a, b } => {
                Some(Envelope::constant(2.0 * a * radius).add(&b.envelope()))
            }
            ScalarConvex::NegSqrt { .. } => None,
            ScalarConvex::Linear { b } => Some(b.envelope()),
        }
    }
}

impl fmt::Display for ScalarConvex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarConvex::Abs => write!(f, "|t|"),
            ScalarConvex::Square => write!(f, "t^2"),
            ScalarConvex::AffineQuad { a, b } => write!(f, "{a}*t^2 + {b}*t"),
            ScalarConvex::NegSqrt { c } => write!(f, "-{c}*sqrt(t)"),
            ScalarConvex::Linear { b } => write!(f, "{b}*t"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn increments_match_differences() {
        let pieces = [
            ScalarConvex::Abs,
            ScalarConvex::Square,
            ScalarConvex::AffineQuad {
                a: 1.5,
                b: Coef::Rule(TailRule::Harmonic(-1.0)),
            },
            ScalarConvex::NegSqrt { c: Coef::Num(2.0) },
            ScalarConvex::Linear { b: Coef::Num(-0.5) },
        ];
        for u in pieces {
            for &(t, d) in &[
                (0.3, 0.1),
                (0.3, -0.5),
                (1.0, -1.0),
                (0.0, 0.25),
                (2.0, 1e-9),
            ] {
                let direct = match (u.value(3, t + d), u.value(3, t)) {
                    (Some(a), Some(b)) => Some(a - b),
                    _ => None,
                };
                let inc = u.increment(3, t, d).map(|p| p.0);
                match (direct, inc) {
                    (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12, "{u} at {t}, {d}"),
                    (None, None) => {}
                    other => panic!("{u}: {other:?}"),
                }
            }
        }
    }

    #[test]
    fn one_sided_derivatives() {
        assert_eq!(ScalarConvex::Abs.one_sided(1, 0.0), (-1.0, 1.0));
        assert_eq!(ScalarConvex::Abs.one_sided(1, -2.0), (-1.0, -1.0));
        let q = ScalarConvex::AffineQuad {
            a: 1.0,
            b: Coef::Rule(TailRule::Harmonic(-1.0)),
        };
        // 2 t - 1/n at t = 1/(2n)
        assert_eq!(q.one_sided(4, 0.125), (0.0, 0.0));
        let s = ScalarConvex::NegSqrt { c: Coef::Num(1.0) };
        assert_eq!(s.one_sided(1, 0.25), (-1.0, -1.0));
        assert_eq!(s.one_sided(1, 0.0), (f64::NEG_INFINITY, f64::NEG_INFINITY));
    }

    #[test]
    fn json_grammar() {
        let u: ScalarConvex =
            serde_json::from_str(r#"{"kind":"affine_quad","a":1,"b":{"kind":"harmonic","c":-1}}"#)
                .unwrap();
        assert_eq!(u.value(2, 1.0), Some(0.5));
        let v: ScalarConvex = serde_json::from_str(r#"{"kind":"linear","b":3}"#).unwrap();
        assert_eq!(v.value(7, 2.0), Some(6.0));
        assert!(
            serde_json::from_str::<ScalarConvex>(r#"{"kind":"affine_quad","a":-1,"b":0}"#).is_err()
        );
        assert!(serde_json::from_str::<ScalarConvex>(
            r#"{"kind":"neg_sqrt","c":{"kind":"geometric","c":1,"r":-0.5}}"#
        )
        .is_err());
        assert!(serde_json::from_str::<ScalarConvex>(r#"{"kind":"cube"}"#).is_err());
    }
}
