use std::fmt;

use serde::{Deserialize, Serialize};

use super::point::{DualPoint, Point};
use super::series::{pair, SeriesValue};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    /// All real sequences with the product topology.
    Rn,
    Ell1,
    EllInf,
}

/// The ambient sequence space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct SpaceDescriptor {
    pub kind: SpaceKind,
    /// Whether every point is the limit of its coordinate expansion.
    pub basis_is_topological: bool,
    /// Uniform bound on the norms of the coordinate projections.
    pub basis_constant: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    kind: SpaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basis_constant: Option<f64>,
}

impl TryFrom<RawSpace> for SpaceDescriptor {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        let mut space = SpaceDescriptor::new(raw.kind);
        if let Some(c) = raw.basis_constant {
            if raw.kind != SpaceKind::Ell1 {
                return Err(Error::Invalid(
                    "basis_constant applies only to the ell1 space".into(),
                ));
            }
            if !(c >= 1.0 && c.is_finite()) {
                return Err(Error::Invalid(format!(
                    "basis_constant must be >= 1, got {c}"
                )));
            }
            space.basis_constant = Some(c);
        }
        Ok(space)
    }
}

impl From<SpaceDescriptor> for RawSpace {
    fn from(s: SpaceDescriptor) -> Self {
        let default = SpaceDescriptor::new(s.kind).basis_constant;
        RawSpace {
            kind: s.kind,
            basis_constant: s.basis_constant.filter(|&c| Some(c) != default),
        }
    }
}

impl SpaceDescriptor {
    pub fn new(kind: SpaceKind) -> Self {
        SpaceDescriptor {
            kind,
            basis_is_topological: kind != SpaceKind::EllInf,
            basis_constant: (kind == SpaceKind::Ell1).then_some(1.0),
        }
    }

    pub fn rn() -> Self {
        Self::new(SpaceKind::Rn)
    }

    pub fn ell1() -> Self {
        Self::new(SpaceKind::Ell1)
    }

    pub fn ellinf() -> Self {
        Self::new(SpaceKind::EllInf)
    }

    pub fn contains(&self, x: &Point) -> bool {
        match self.kind {
            SpaceKind::Rn => true,
            SpaceKind::Ell1 => x.in_ell1(),
            SpaceKind::EllInf => x.in_ellinf(),
        }
    }

    pub fn check_contains(&self, x: &Point) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::DomainViolation(format!(
                "point {x} is not in {self}"
            )))
        }
    }

    /// Whether `p` is a continuous linear functional on this space.
    pub fn dual_contains(&self, p: &DualPoint) -> bool {
        match self.kind {
            SpaceKind::Rn => p.is_finitely_supported(),
            SpaceKind::Ell1 => true,
            SpaceKind::EllInf => p.as_point().in_ell1(),
        }
    }

    /// `<p, x>` with the dual restrictions of this space enforced.
    pub fn pair(&self, p: &DualPoint, x: &Point, tol: f64) -> Result<SeriesValue> {
        if !self.dual_contains(p) {
            return Err(Error::NonConvergentPairing);
        }
        pair(p, x, tol)
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.kind {
            SpaceKind::Rn => "R^N",
            SpaceKind::Ell1 => "l1",
            SpaceKind::EllInf => "l-infinity",
        })
    }
}
