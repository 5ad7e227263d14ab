use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqspace::{Point, SpaceDescriptor};

/// Convex feasible set `X`, always a coordinate-wise product intersected
/// with the ambient space.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawSet", into = "RawSet")]
pub enum SetDescriptor {
    #[default]
    WholeSpace,
    /// Nonnegative summable sequences.
    PositiveConeEll1,
    /// `lower_n <= x_n <= upper_n`
    Box { lower: Point, upper: Point },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawSet {
    WholeSpace {},
    PositiveConeEll1 {},
    Box { lower: Point, upper: Point },
}

impl TryFrom<RawSet> for SetDescriptor {
    type Error = Error;

    fn try_from(raw: RawSet) -> Result<Self> {
        match raw {
            RawSet::WholeSpace {} => Ok(SetDescriptor::WholeSpace),
            RawSet::PositiveConeEll1 {} => Ok(SetDescriptor::PositiveConeEll1),
            RawSet::Box { lower, upper } => SetDescriptor::new_box(lower, upper),
        }
    }
}

impl From<SetDescriptor> for RawSet {
    fn from(s: SetDescriptor) -> Self {
        match s {
            SetDescriptor::WholeSpace => RawSet::WholeSpace {},
            SetDescriptor::PositiveConeEll1 => RawSet::PositiveConeEll1 {},
            SetDescriptor::Box { lower, upper } => RawSet::Box { lower, upper },
        }
    }
}

impl SetDescriptor {
    pub fn new_box(lower: Point, upper: Point) -> Result<Self> {
        if let Some(n) = upper.sub(&lower).first_negative()? {
            return Err(Error::Invalid(format!(
                "empty box: lower exceeds upper at coordinate {n}"
            )));
        }
        Ok(SetDescriptor::Box { lower, upper })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SetDescriptor::WholeSpace => "whole_space",
            SetDescriptor::PositiveConeEll1 => "positive_cone_ell1",
            SetDescriptor::Box { .. } => "box",
        }
    }

    /// First coordinate at which `x` violates the set's constraints, or
    /// `Some(0)` when `x` is outside the ambient space or the cone's `l1`.
    pub fn violation(&self, space: &SpaceDescriptor, x: &Point) -> Result<Option<usize>> {
        if !space.contains(x) {
            return Ok(Some(0));
        }
        match self {
            SetDescriptor::WholeSpace => Ok(None),
            SetDescriptor::PositiveConeEll1 => {
                if !x.in_ell1() {
                    return Ok(Some(0));
                }
                x.first_negative()
            }
            SetDescriptor::Box { lower, upper } => {
                let below = x.sub(lower).first_negative()?;
                let above = upper.sub(x).first_negative()?;
                Ok(min_index(below, above))
            }
        }
    }

    pub fn contains(&self, space: &SpaceDescriptor, x: &Point) -> Result<bool> {
        Ok(self.violation(space, x)?.is_none())
    }

    /// Bounds on coordinate `n` of points in the set.
    pub fn coordinate_bounds(&self, n: usize) -> (f64, f64) {
        match self {
            SetDescriptor::WholeSpace => (f64::NEG_INFINITY, f64::INFINITY),
            SetDescriptor::PositiveConeEll1 => (0.0, f64::INFINITY),
            SetDescriptor::Box { lower, upper } => (lower.coordinate(n), upper.coordinate(n)),
        }
    }

    /// First `n` with `x_n` on the boundary of its coordinate interval. The
    /// truncation `P^k(x)` is interior to `X^k` for every `k` exactly when
    /// there is none.
    pub fn first_boundary_coordinate(&self, x: &Point) -> Result<Option<usize>> {
        match self {
            SetDescriptor::WholeSpace => Ok(None),
            SetDescriptor::PositiveConeEll1 => x.first_nonpositive(),
            SetDescriptor::Box { lower, upper } => {
                let below = x.sub(lower).first_nonpositive()?;
                let above = upper.sub(x).first_nonpositive()?;
                Ok(min_index(below, above))
            }
        }
    }

    /// Whether `x* + P^k(x - x*)` stays in the set for all `x` in the set
    /// and all `k`. Holds for every coordinate-wise product set.
    pub fn stable_under_projection(&self) -> bool {
        true
    }
}

fn min_index(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}
