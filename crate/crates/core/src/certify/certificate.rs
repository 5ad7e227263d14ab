use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::derivative::{DirDerivResult, Method};
use crate::seqspace::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "HOLDS",
            Verdict::Fails => "FAILS",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Whether a claim quantified over every index was established exactly or
/// only for the first `N` indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grade {
    AnalyticAllN,
    NumericFirstN(usize),
}

impl Grade {
    /// The weaker of two grades.
    pub fn meet(self, other: Grade) -> Grade {
        match (self, other) {
            (Grade::AnalyticAllN, g) | (g, Grade::AnalyticAllN) => g,
            (Grade::NumericFirstN(a), Grade::NumericFirstN(b)) => Grade::NumericFirstN(a.min(b)),
        }
    }

    pub fn is_analytic(self) -> bool {
        self == Grade::AnalyticAllN
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grade::AnalyticAllN => f.write_str("ANALYTIC_ALL_N"),
            Grade::NumericFirstN(n) => write!(f, "NUMERIC_FIRST_N({n})"),
        }
    }
}

impl Serialize for Grade {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Machine-checkable reason for a FAILS verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// `f'(x*; e_n)` is not the required value, or does not exist.
    Coordinate {
        n: usize,
        left: f64,
        right: f64,
        expected: f64,
    },
    /// A point of the feasible set with `value < reference - tol`.
    Probe {
        label: String,
        point: Point,
        value: f64,
        reference: f64,
    },
    /// `f(x* + P^k(x - x*)) > f(x) + tol`.
    Truncation {
        label: String,
        point: Point,
        k: usize,
        truncated_value: f64,
        value: f64,
    },
    /// A direction along which the one-sided derivatives differ.
    Direction { h: Point, left: f64, right: f64 },
    /// `P^k(x*)` lies on the boundary of the `k`-th truncated set because
    /// coordinate `k` touches a bound.
    Interior {
        k: usize,
        coordinate: f64,
        lower: f64,
        upper: f64,
    },
    /// The point violates the set at coordinate `n` (`0`: not in the space).
    NotInSet { n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoordinateRecord {
    pub n: usize,
    pub left: f64,
    pub right: f64,
    pub exists: bool,
    pub value: Option<f64>,
    pub method: Method,
}

impl CoordinateRecord {
    pub fn from_result(n: usize, r: &DirDerivResult) -> Self {
        CoordinateRecord {
            n,
            left: r.left,
            right: r.right,
            exists: r.exists,
            value: r.value,
            method: r.method,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRecord {
    pub label: String,
    pub value: f64,
    pub reference: f64,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Evidence {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub coordinates: Vec<CoordinateRecord>,
    /// Closed forms of `n -> f'(x*; e_n)` and where they start to apply.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub forms: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<ProbeRecord>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub multipliers: BTreeMap<String, Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Certificate>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub check: String,
    pub verdict: Verdict,
    pub grade: Grade,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub evidence: Evidence,
}

impl Certificate {
    pub fn holds(check: &str, grade: Grade) -> Self {
        Certificate {
            check: check.to_string(),
            verdict: Verdict::Holds,
            grade,
            reason: None,
            witness: None,
            evidence: Evidence::default(),
        }
    }

    pub fn fails(check: &str, grade: Grade, witness: Witness) -> Self {
        Certificate {
            verdict: Verdict::Fails,
            witness: Some(witness),
            ..Certificate::holds(check, grade)
        }
    }

    pub fn inconclusive(check: &str, grade: Grade, reason: impl Into<String>) -> Self {
        Certificate {
            verdict: Verdict::Inconclusive,
            reason: Some(reason.into()),
            ..Certificate::holds(check, grade)
        }
    }

    pub fn with_reason(mut self, reason: impl Into<String>) -> Self {
        self.reason = Some(reason.into());
        self
    }

    pub fn with_evidence(mut self, evidence: Evidence) -> Self {
        self.evidence = evidence;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fails
    }

    /// Sub-certificate with the given check name, searched depth first.
    pub fn find(&self, check: &str) -> Option<&Certificate> {
        if self.check == check {
            return Some(self);
        }
        self.evidence.checks.iter().find_map(|c| c.find(check))
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} [{}]", self.check, self.verdict, self.grade)?;
        if let Some(r) = &self.reason {
            write!(f, " ({r})")?;
        }
        Ok(())
    }
}
