use std::fmt;

use serde::{Deserialize, Serialize};

use super::scalar::{Coef, ScalarConvex};
use crate::error::{Error, Result};
use crate::seqspace::{DualPoint, Point, TailRule};

/// A convex function on a sequence space, built from a closed grammar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawExpr", into = "RawExpr")]
pub enum FunctionExpr {
    /// `limsup |x_n|`
    Limsup,
    /// `sum_n w_n u_n(x_n)` with `w_n >= 0`.
    Separable {
        weight: Coef,
        inner: ScalarConvex,
    },
    /// `<p, x> + offset`
    Linear {
        p: DualPoint,
        offset: f64,
    },
    Sum(Vec<FunctionExpr>),
    /// `lambda * f`, `lambda >= 0`
    Scale(f64, Box<FunctionExpr>),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawExpr {
    Limsup {},
    Separable {
        weight: Coef,
        inner: ScalarConvex,
    },
    Linear {
        p: DualPoint,
        #[serde(default)]
        offset: f64,
    },
    Sum {
        terms: Vec<FunctionExpr>,
    },
    Scale {
        lambda: f64,
        f: Box<FunctionExpr>,
    },
}

impl TryFrom<RawExpr> for FunctionExpr {
    type Error = Error;

    fn try_from(raw: RawExpr) -> Result<Self> {
        match raw {
            RawExpr::Limsup {} => Ok(FunctionExpr::Limsup),
            RawExpr::Separable { weight, inner } => FunctionExpr::separable(weight, inner),
            RawExpr::Linear { p, offset } => FunctionExpr::affine(p, offset),
            RawExpr::Sum { terms } => Ok(FunctionExpr::Sum(terms)),
            RawExpr::Scale { lambda, f } => scale(lambda, *f),
        }
    }
}

impl From<FunctionExpr> for RawExpr {
    fn from(f: FunctionExpr) -> Self {
        match f {
            FunctionExpr::Limsup => RawExpr::Limsup {},
            FunctionExpr::Separable { weight, inner } => RawExpr::Separable { weight, inner },
            FunctionExpr::Linear { p, offset } => RawExpr::Linear { p, offset },
            FunctionExpr::Sum(terms) => RawExpr::Sum { terms },
            FunctionExpr::Scale(lambda, f) => RawExpr::Scale { lambda, f },
        }
    }
}

impl FunctionExpr {
    pub fn separable(weight: impl Into<Coef>, inner: ScalarConvex) -> Result<Self> {
        let weight = weight.into();
        if let Coef::Num(w) = weight {
            if !w.is_finite() {
                return Err(Error::Invalid(format!("weight must be finite, got {w}")));
            }
        }
        if !weight.is_nonnegative() {
            return Err(Error::Invalid(format!(
                "separable weights must be >= 0 for every n, got {weight}"
            )));
        }
        inner.validate()?;
        Ok(FunctionExpr::Separable { weight, inner })
    }

    pub fn linear(p: DualPoint) -> Self {
        FunctionExpr::Linear { p, offset: 0.0 }
    }

    pub fn affine(p: DualPoint, offset: f64) -> Result<Self> {
        if !offset.is_finite() {
            return Err(Error::Invalid(format!(
                "offset must be finite, got {offset}"
            )));
        }
        Ok(FunctionExpr::Linear { p, offset })
    }

    /// Visit every leaf with the product of the scale factors above it.
    pub fn for_each_leaf(&self, mut visit: impl FnMut(f64, &FunctionExpr)) {
        fn walk(f: &FunctionExpr, lambda: f64, visit: &mut dyn FnMut(f64, &FunctionExpr)) {
            match f {
                FunctionExpr::Sum(terms) => terms.iter().for_each(|t| walk(t, lambda, visit)),
                FunctionExpr::Scale(l, g) => walk(g, lambda * l, visit),
                leaf => visit(lambda, leaf),
            }
        }
        walk(self, 1.0, &mut visit);
    }

    /// Total factor in front of the limsup seminorm.
    pub fn limsup_weight(&self) -> f64 {
        let mut total = 0.0;
        self.for_each_leaf(|l, leaf| {
            if matches!(leaf, FunctionExpr::Limsup) {
                total += l;
            }
        });
        total
    }

    /// Largest explicit prefix among the dual elements inside `f`.
    pub fn prefix_len(&self) -> usize {
        let mut m = 0;
        self.for_each_leaf(|_, leaf| {
            if let FunctionExpr::Linear { p, .. } = leaf {
                m = m.max(p.as_point().prefix_len());
            }
        });
        m
    }

    /// Whether some leaf can have unequal one-sided coordinate derivatives.
    pub fn has_kinks(&self) -> bool {
        let mut any = false;
        self.for_each_leaf(|l, leaf| {
            if let FunctionExpr::Separable { weight, inner } = leaf {
                let kink = match inner {
                    ScalarConvex::Abs => l > 0.0 && !weight.is_zero(),
                    ScalarConvex::NegSqrt { .. } => true,
                    _ => false,
                };
                any |= kink;
            }
        });
        any
    }
}

/// `f_1 + ... + f_m`.
pub fn combine_sum(fs: Vec<FunctionExpr>) -> FunctionExpr {
    FunctionExpr::Sum(fs)
}

/// `lambda * f` for `lambda >= 0`.
pub fn scale(lambda: f64, f: FunctionExpr) -> Result<FunctionExpr> {
    if lambda.is_nan() || lambda.is_infinite() {
        return Err(Error::Invalid(format!(
            "scale factor must be finite, got {lambda}"
        )));
    }
    if lambda < 0.0 {
        return Err(Error::NegativeScale(lambda));
    }
    Ok(FunctionExpr::Scale(lambda, Box::new(f)))
}

/// `f - p`.
pub fn subtract_linear(f: FunctionExpr, p: &DualPoint) -> FunctionExpr {
    FunctionExpr::Sum(vec![f, FunctionExpr::linear(p.scale(-1.0))])
}

/// `sum |x_n|`.
pub fn l1_norm() -> FunctionExpr {
    FunctionExpr::Separable {
        weight: Coef::Num(1.0),
        inner: ScalarConvex::Abs,
    }
}

/// `sum beta^n x_n^2`.
pub fn weighted_square(beta: f64) -> Result<FunctionExpr> {
    FunctionExpr::separable(TailRule::geometric(1.0, beta)?, ScalarConvex::Square)
}

/// `limsup |x_n| + sum beta^n (x_n^2 - x_n / n)`.
pub fn example3_objective(beta: f64) -> Result<FunctionExpr> {
    Ok(FunctionExpr::Sum(vec![
        FunctionExpr::Limsup,
        FunctionExpr::separable(
            TailRule::geometric(1.0, beta)?,
            ScalarConvex::AffineQuad {
                a: 1.0,
                b: Coef::Rule(TailRule::Harmonic(-1.0)),
            },
        )?,
    ]))
}

/// `sum x_n - 2 sum beta^n sqrt(x_n)`.
pub fn example4_objective(beta: f64) -> Result<FunctionExpr> {
    Ok(FunctionExpr::Sum(vec![
        FunctionExpr::separable(1.0, ScalarConvex::Linear { b: Coef::Num(1.0) })?,
        FunctionExpr::separable(
            TailRule::geometric(2.0, beta)?,
            ScalarConvex::NegSqrt { c: Coef::Num(1.0) },
        )?,
    ]))
}

/// `limsup |x_n| + sum beta^n (x_n^2 - 2 x_n)`.
pub fn example5_objective(beta: f64) -> Result<FunctionExpr> {
    Ok(FunctionExpr::Sum(vec![
        FunctionExpr::Limsup,
        FunctionExpr::separable(
            TailRule::geometric(1.0, beta)?,
            ScalarConvex::AffineQuad {
                a: 1.0,
                b: Coef::Num(-2.0),
            },
        )?,
    ]))
}

/// `offset - x_n`, i.e. the constraint `x_n >= offset` written as `g <= 0`.
pub fn lower_bound_constraint(n: usize, offset: f64) -> Result<FunctionExpr> {
    FunctionExpr::affine(DualPoint::coordinate_functional(n).scale(-1.0), offset)
}

/// The point `(1/(2n))`.
pub fn example3_minimizer() -> Point {
    Point::from_rule(Vec::new(), TailRule::Harmonic(0.5))
}

/// The point `(beta^(2n))`.
pub fn example4_minimizer(beta: f64) -> Result<Point> {
    Ok(Point::from_rule(
        Vec::new(),
        TailRule::geometric(1.0, beta * beta)?,
    ))
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionExpr::Limsup => write!(f, "limsup|x_n|"),
            FunctionExpr::Separable { weight, inner } => write!(f, "sum {weight}*[{inner}]"),
            FunctionExpr::Linear { p, offset } => {
                if *offset == 0.0 {
                    write!(f, "<{}, x>", p.as_point())
                } else {
                    write!(f, "<{}, x> + {offset}", p.as_point())
                }
            }
            FunctionExpr::Sum(terms) => {
                write!(f, "(")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            FunctionExpr::Scale(l, g) => write!(f, "{l}*{g}"),
        }
    }
}
