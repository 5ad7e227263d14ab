//! Finite-dimensional reductions `f^k(y) = f(x* + (embed(y) - P^k x*))` and a
//! derivative-free coordinate-descent minimizer used as an independent oracle.

use serde::{Deserialize, Serialize};

use crate::certify::SetDescriptor;
use crate::derivative::{dir_deriv, DerivOpts};
use crate::error::{Error, Result};
use crate::funcs::{check_domain, evaluate, increment, FunctionExpr};
use crate::seqspace::{Point, SpaceDescriptor, DEFAULT_SERIES_TOL};

#[derive(Debug, Clone)]
pub struct ReducedProblem {
    k: usize,
    anchor: Point,
    f: FunctionExpr,
    set: SetDescriptor,
    /// Constraints `g_j <= 0` with their values at the anchor.
    inequalities: Vec<(FunctionExpr, f64)>,
    base: f64,
    tol: f64,
}

pub fn build_reduced(
    f: &FunctionExpr,
    set: &SetDescriptor,
    space: &SpaceDescriptor,
    anchor: &Point,
    k: usize,
) -> Result<ReducedProblem> {
    if k == 0 {
        return Err(Error::Invalid(
            "reduction dimension must be at least 1".into(),
        ));
    }
    if let Some(n) = set.violation(space, anchor)? {
        return Err(Error::DomainViolation(format!(
            "anchor is outside the {} set (coordinate {n})",
            set.name()
        )));
    }
    let tol = DEFAULT_SERIES_TOL;
    let base = evaluate(f, anchor, tol)?.value;
    Ok(ReducedProblem {
        k,
        anchor: anchor.clone(),
        f: f.clone(),
        set: set.clone(),
        inequalities: Vec::new(),
        base,
        tol,
    })
}

impl ReducedProblem {
    /// Restrict further to `g_j <= 0`.
    pub fn with_inequalities(mut self, gs: &[FunctionExpr]) -> Result<Self> {
        for g in gs {
            check_domain(g, &self.anchor)?;
            let v = evaluate(g, &self.anchor, self.tol)?.value;
            self.inequalities.push((g.clone(), v));
        }
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn anchor(&self) -> &Point {
        &self.anchor
    }

    /// `P^k(x*)` as a vector.
    pub fn anchor_head(&self) -> Vec<f64> {
        self.anchor.head(self.k)
    }

    /// The point of `E` represented by `y`.
    pub fn embed(&self, y: &[f64]) -> Point {
        self.anchor.with_head(y)
    }

    fn check_len(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.k {
            return Err(Error::Invalid(format!(
                "expected {} reduced coordinates, got {}",
                self.k,
                y.len()
            )));
        }
        Ok(())
    }

    fn feasible_head(&self, y: &[f64]) -> bool {
        y.iter().enumerate().all(|(i, &v)| {
            let (lo, hi) = self.set.coordinate_bounds(i + 1);
            v.is_finite() && lo <= v && v <= hi
        })
    }

    /// `f^k(y)`, `+inf` outside `X^k`, outside the constraints or outside the
    /// domain of `f`.
    pub fn value(&self, y: &[f64]) -> Result<f64> {
        self.check_len(y)?;
        if !self.feasible_head(y) {
            return Ok(f64::INFINITY);
        }
        let d = Point::from_rule(
            y.iter()
                .zip(self.anchor_head())
                .map(|(a, b)| a - b)
                .collect(),
            crate::seqspace::TailRule::Zero,
        );
        for (g, g0) in &self.inequalities {
            let gv = g0 + increment(g, &self.anchor, 1.0, &d, self.tol)?.value;
            if gv > 0.0 {
                return Ok(f64::INFINITY);
            }
        }
        Ok(self.base + increment(&self.f, &self.anchor, 1.0, &d, self.tol)?.value)
    }
}

/// Gradient of `f^k` at `y`; every partial derivative must exist.
pub fn grad_reduced(rp: &ReducedProblem, y: &[f64], opts: &DerivOpts) -> Result<Vec<f64>> {
    rp.check_len(y)?;
    let x = rp.embed(y);
    let opts = DerivOpts {
        prefer_analytic: false,
        ..*opts
    };
    (1..=rp.k)
        .map(|i| {
            let r = dir_deriv(&rp.f, &x, &Point::basis(i), &opts)?;
            r.value.ok_or(Error::PartialNotDifferentiable(i))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinimizeOpts {
    pub width: f64,
    pub min_decrease: f64,
    pub max_sweeps: usize,
    pub bound: f64,
}

impl Default for MinimizeOpts {
    fn default() -> Self {
        MinimizeOpts {
            width: 1e-12,
            min_decrease: 1e-14,
            max_sweeps: 10_000,
            bound: 1e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedMinimum {
    pub y: Vec<f64>,
    pub value: f64,
    pub sweeps: usize,
}

/// Minimize `f^k` by cyclic coordinate descent with exact convex line
/// searches.
pub fn minimize_reduced(rp: &ReducedProblem, opts: &MinimizeOpts) -> Result<ReducedMinimum> {
    let head = rp.anchor_head();
    let shifted: Vec<f64> = head.iter().map(|v| v + 0.5).collect();
    let (mut y, mut value) = match rp.value(&shifted)? {
        v if v.is_finite() => (shifted, v),
        _ => (head.clone(), rp.value(&head)?),
    };
    if !value.is_finite() {
        return Err(Error::DomainViolation(
            "anchor is not a feasible point of the reduction".into(),
        ));
    }
    for sweep in 1..=opts.max_sweeps {
        let before = value;
        for i in 0..rp.k {
            let (s, v) = line_search(rp, &mut y, i, value, opts)?;
            if v < value {
                y[i] = s;
                value = v;
            }
        }
        if before - value < opts.min_decrease {
            return Ok(ReducedMinimum {
                y,
                value,
                sweeps: sweep,
            });
        }
    }
    Err(Error::MaxSweeps(opts.max_sweeps))
}

/// Minimize `s -> f^k(y with y_i = s)` starting from `y_i` with value `v0`.
/// Leaves `y` unchanged and returns the best `(s, value)` found.
fn line_search(
    rp: &ReducedProblem,
    y: &mut [f64],
    i: usize,
    v0: f64,
    opts: &MinimizeOpts,
) -> Result<(f64, f64)> {
    let s0 = y[i];
    let (lo, hi) = rp.set.coordinate_bounds(i + 1);
    let mut phi = |s: f64| -> Result<f64> {
        let keep = y[i];
        y[i] = s;
        let v = rp.value(y);
        y[i] = keep;
        v
    };
    let step = 1e-3 * s0.abs().max(1.0);
    let mut best = (s0, v0);
    let mut ends = [s0; 2];
    for (side, dir) in [(0usize, -1.0f64), (1, 1.0)] {
        let limit = if dir > 0.0 { hi } else { lo };
        let (mut prev, mut fprev) = (s0, v0);
        let mut d = step;
        loop {
            let mut s = s0 + dir * d;
            if dir * (s - limit) >= 0.0 {
                s = limit;
            }
            if s.abs() > opts.bound {
                return Err(Error::Unbounded { bound: opts.bound });
            }
            let v = phi(s)?;
            if !v.is_finite() {
                ends[side] = feasibility_edge(&mut phi, prev, s)?;
                break;
            }
            if v < best.1 {
                best = (s, v);
            }
            if v >= fprev || s == limit {
                ends[side] = s;
                break;
            }
            (prev, fprev) = (s, v);
            d *= 2.0;
        }
    }

    // golden-section search on [a, b]
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (ends[0], ends[1]);
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let mut fc = phi(c)?;
    let mut fe = phi(e)?;
    while b - a > opts.width.max(4.0 * f64::EPSILON * a.abs().max(b.abs())) {
        if fc <= fe {
            (b, e, fe) = (e, c, fc);
            c = b - g * (b - a);
            fc = phi(c)?;
        } else {
            (a, c, fc) = (c, e, fe);
            e = a + g * (b - a);
            fe = phi(e)?;
        }
    }
    for (s, v) in [(c, fc), (e, fe)] {
        if v < best.1 {
            best = (s, v);
        }
    }
    Ok(best)
}

/// Last evaluable point between a feasible `inside` and an infeasible
/// `outside`, by bisection.
fn feasibility_edge(
    phi: &mut impl FnMut(f64) -> Result<f64>,
    mut inside: f64,
    mut outside: f64,
) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if phi(mid)?.is_finite() {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(inside)
}
