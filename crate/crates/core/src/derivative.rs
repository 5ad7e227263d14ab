//! Numeric directional derivatives of convex functions.
//!
//! For convex `f` the right difference quotient `(f(x + t h) - f(x)) / t` is
//! nondecreasing in `t`, so every right quotient is an upper bound of the
//! right derivative and every left quotient a lower bound of the left one.
//! The existence decision uses only these bounds; extrapolation only shapes
//! the reported values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcs::{analytic_dir_deriv, increment, AnalyticDeriv, FunctionExpr};
use crate::seqspace::{Point, DEFAULT_SERIES_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DerivOpts {
    /// Initial step; chosen from `x` and `h` when absent.
    pub t0: Option<f64>,
    /// Number of halvings after the initial step.
    pub steps: usize,
    pub tol_match: f64,
    pub noise_scale: f64,
    pub prefer_analytic: bool,
    pub series_tol: f64,
}

impl Default for DerivOpts {
    fn default() -> Self {
        DerivOpts {
            t0: None,
            steps: 40,
            tol_match: 1e-7,
            noise_scale: 16.0,
            prefer_analytic: true,
            series_tol: DEFAULT_SERIES_TOL,
        }
    }
}

impl DerivOpts {
    pub fn numeric() -> Self {
        DerivOpts {
            prefer_analytic: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirDerivResult {
    pub right: f64,
    pub left: f64,
    pub exists: bool,
    pub value: Option<f64>,
    pub noise_floor: f64,
    /// `(t, quotient)`; negative `t` for the left side.
    pub quotients_log: Vec<(f64, f64)>,
    pub method: Method,
}

impl DirDerivResult {
    fn analytic(d: AnalyticDeriv) -> Option<Self> {
        let (left, right) = match d {
            AnalyticDeriv::Exists { value } => (value, value),
            AnalyticDeriv::NotDifferentiable { left, right } => (left, right),
            AnalyticDeriv::Unavailable => return None,
        };
        let exists = left == right && left.is_finite();
        Some(DirDerivResult {
            right,
            left,
            exists,
            value: exists.then_some(left),
            noise_floor: 0.0,
            quotients_log: Vec::new(),
            method: Method::Analytic,
        })
    }
}

struct Side {
    /// `(|t|, quotient, noise)` for the evaluable steps, largest `|t|` first.
    quotients: Vec<(f64, f64, f64)>,
}

impl Side {
    /// Upper bound of the right derivative (or, mirrored, lower bound of the
    /// left one) after accounting for noise.
    fn bound(&self, sign: f64) -> f64 {
        self.quotients
            .iter()
            .map(|&(_, q, e)| sign * q + e)
            .fold(f64::INFINITY, f64::min)
            * sign
    }

    /// Extrapolated limit: geometric gap ratios near 1/2 indicate a linear
    /// error term, whose remaining sum equals the last gap.
    fn extrapolate(&self) -> f64 {
        let q: Vec<f64> = self.quotients.iter().map(|e| e.1).collect();
        let k = q.len();
        let last = q[k - 1];
        if k < 3 {
            return last;
        }
        let g1 = q[k - 3] - q[k - 2];
        let g2 = q[k - 2] - q[k - 1];
        if g1 != 0.0 {
            let ratio = g2 / g1;
            if (0.35..=0.65).contains(&ratio) {
                return last - g2 * ratio / (1.0 - ratio);
            }
        }
        last
    }

    fn noise(&self) -> f64 {
        self.quotients.last().map_or(0.0, |e| e.2)
    }
}

fn initial_step(x: &Point, h: &Point) -> f64 {
    match h.as_basis_index() {
        // relative to the coordinate, so steps stay well inside the scale
        // on which a domain edge or kink can sit
        Some(n) => 1e-2 * x.coordinate(n).abs().max(1e-6),
        None => 1e-2 / h.sup_abs().max(1.0),
    }
}

/// Quotients on one side; `sign = 1` for `t > 0`, `-1` for `t < 0`.
fn one_side(
    f: &FunctionExpr,
    x: &Point,
    h: &Point,
    sign: f64,
    t0: f64,
    opts: &DerivOpts,
) -> Result<Side> {
    let mut quotients: Vec<(f64, f64, f64)> = Vec::new();
    let mut t = t0;
    for j in 0..=opts.steps {
        let inc = increment(f, x, sign * t, h, opts.series_tol * t)?;
        if inc.value.is_finite() {
            let q = inc.value / (sign * t);
            let noise = (opts.noise_scale * f64::EPSILON * inc.magnitude + inc.tail_bound) / t;
            if let Some(&(_, prev, prev_noise)) = quotients.last() {
                // right quotients decrease and left quotients increase as t -> 0
                if sign * (q - prev) > noise + prev_noise {
                    return Err(Error::NonConvexBehavior {
                        step: j,
                        earlier: prev,
                        later: q,
                        noise: noise + prev_noise,
                    });
                }
                let settled = (q - prev).abs() <= noise && quotients.len() >= 2;
                quotients.push((t, q, noise));
                if settled {
                    break;
                }
            } else {
                quotients.push((t, q, noise));
            }
        } else if !quotients.is_empty() {
            // infeasible steps can only precede feasible ones for convex f
            return Err(Error::NonConvexBehavior {
                step: j,
                earlier: quotients.last().map_or(f64::NAN, |e| e.1),
                later: inc.value,
                noise: 0.0,
            });
        }
        t *= 0.5;
    }
    Ok(Side { quotients })
}

/// `f'(x; h)` from one-sided difference quotients.
pub fn dir_deriv(
    f: &FunctionExpr,
    x: &Point,
    h: &Point,
    opts: &DerivOpts,
) -> Result<DirDerivResult> {
    if opts.prefer_analytic {
        if let Some(n) = h.as_basis_index() {
            if let Some(r) = DirDerivResult::analytic(analytic_dir_deriv(f, x, n)?) {
                return Ok(r);
            }
        }
    }
    crate::funcs::check_domain(f, x)?;
    let t0 = opts.t0.unwrap_or_else(|| initial_step(x, h));
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::Invalid(format!(
            "initial step must be positive, got {t0}"
        )));
    }
    let right = one_side(f, x, h, 1.0, t0, opts)?;
    let left = one_side(f, x, h, -1.0, t0, opts)?;
    match (right.quotients.is_empty(), left.quotients.is_empty()) {
        (true, true) => {
            return Err(Error::DomainViolation(
                "no step along the direction stays in the domain".into(),
            ))
        }
        (true, false) => return Err(Error::DomainLimited { evaluable: "left" }),
        (false, true) => return Err(Error::DomainLimited { evaluable: "right" }),
        _ => {}
    }

    // right derivative <= right_bound, left derivative >= left_bound
    let right_bound = right.bound(1.0);
    let left_bound = left.bound(-1.0);
    // every left quotient lies below every right quotient
    if left_bound > right_bound {
        return Err(Error::NonConvexBehavior {
            step: 0,
            earlier: left_bound,
            later: right_bound,
            noise: 0.0,
        });
    }
    let noise_floor = right.noise().max(left.noise());
    let gap = right_bound - left_bound;
    let exists = gap <= opts.tol_match;
    let (r, l) = if exists {
        // one common value inside the certified bracket
        let v = (0.5 * (right.extrapolate() + left.extrapolate())).clamp(left_bound, right_bound);
        (v, v)
    } else {
        (right_bound, left_bound)
    };
    let mut log: Vec<(f64, f64)> = right.quotients.iter().map(|e| (e.0, e.1)).collect();
    log.extend(left.quotients.iter().map(|e| (-e.0, e.1)));
    Ok(DirDerivResult {
        right: r,
        left: l,
        exists,
        value: exists.then_some(0.5 * (r + l)),
        noise_floor,
        quotients_log: log,
        method: Method::Numeric,
    })
}

/// Error tagged with the coordinate direction it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateError {
    pub n: usize,
    pub error: Error,
}

impl std::fmt::Display for CoordinateError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "direction e_{}: {}", self.n, self.error)
    }
}

impl std::error::Error for CoordinateError {}

/// `f'(x; e_n)` for `n = 1..=count`, computed in parallel, in index order.
pub fn dir_deriv_profile(
    f: &FunctionExpr,
    x: &Point,
    count: usize,
    opts: &DerivOpts,
) -> std::result::Result<Vec<DirDerivResult>, CoordinateError> {
    (1..=count)
        .into_par_iter()
        .map(|n| {
            dir_deriv(f, x, &Point::basis(n), opts).map_err(|error| CoordinateError { n, error })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::{example3_objective, example4_objective, l1_norm};
    use crate::seqspace::TailRule;

    #[test]
    fn ell1_norm_along_its_point() {
        let r = dir_deriv(
            &l1_norm(),
            &Point::basis(1),
            &Point::basis(1),
            &DerivOpts::numeric(),
        )
        .unwrap();
        assert!(r.exists);
        assert!((r.value.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.method, Method::Numeric);
    }

    #[test]
    fn limsup_along_constant_direction() {
        let r = dir_deriv(
            &FunctionExpr::Limsup,
            &Point::zero(),
            &Point::constant(1.0),
            &DerivOpts::default(),
        )
        .unwrap();
        assert!(!r.exists);
        assert!((r.right - 1.0).abs() <= 1e-7);
        assert!((r.left + 1.0).abs() <= 1e-7);
    }

    #[test]
    fn example3_stationary_along_e5() {
        let f = example3_objective(0.5).unwrap();
        let x = Point::from_rule(vec![], TailRule::Harmonic(0.5));
        let r = dir_deriv(&f, &x, &Point::basis(5), &DerivOpts::numeric()).unwrap();
        assert!(r.exists);
        assert!(r.value.unwrap().abs() <= 1e-8);
    }

    #[test]
    fn example4_profile_is_zero() {
        let f = example4_objective(0.5).unwrap();
        let x = Point::from_rule(vec![], TailRule::Geometric(1.0, 0.25));
        let profile = dir_deriv_profile(&f, &x, 10, &DerivOpts::numeric()).unwrap();
        for (i, r) in profile.iter().enumerate() {
            assert!(r.exists, "n = {}", i + 1);
            assert!(
                r.value.unwrap().abs() <= 1e-8,
                "n = {}: {:?}",
                i + 1,
                r.value
            );
        }
    }

    #[test]
    fn ell1_norm_profile_flags_zero_coordinate() {
        let x = Point::from_rule(vec![1.0, -2.0, 0.0, 4.0, 0.5], TailRule::Zero);
        let profile = dir_deriv_profile(&l1_norm(), &x, 5, &DerivOpts::numeric()).unwrap();
        let exists: Vec<bool> = profile.iter().map(|r| r.exists).collect();
        assert_eq!(exists, vec![true, true, false, true, true]);
    }

    #[test]
    fn analytic_path_is_recorded() {
        let r = dir_deriv(
            &l1_norm(),
            &Point::basis(1),
            &Point::basis(2),
            &DerivOpts::default(),
        )
        .unwrap();
        assert_eq!(r.method, Method::Analytic);
        assert_eq!((r.left, r.right), (-1.0, 1.0));
        assert!(!r.exists);
    }

    #[test]
    fn boundary_point_is_domain_limited() {
        let f = example4_objective(0.5).unwrap();
        let x = Point::from_rule(vec![0.0], TailRule::Geometric(1.0, 0.25));
        assert_eq!(
            dir_deriv(&f, &x, &Point::basis(1), &DerivOpts::numeric()),
            Err(Error::DomainLimited { evaluable: "right" })
        );
    }
}
