//! Running a scenario and the resulting report.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use super::scenario::{Expected, Scenario, Task};
use crate::certify::{
    certify_min, check_psc, check_qualification, gateaux_detect, kkt_certify, series_differentiate,
    subgradient_test, Certificate, CoordinateRecord, GateauxDerivative, Grade, Verdict, Witness,
};
use crate::derivative::dir_deriv_profile;
use crate::error::{Error, Result};
use crate::funcs::{evaluate, tail_existence, Existence, FunctionExpr};
use crate::reduce::{build_reduced, minimize_reduced, MinimizeOpts};

/// Agreement required between the oracle and `f(x*)`.
pub const ORACLE_TOL: f64 = 1e-6;
pub const DEFAULT_ORACLE_K: [usize; 4] = [1, 2, 4, 8];

/// Command-line overrides applied on top of each scenario.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub coords: Option<usize>,
    pub psc_depth: Option<usize>,
    pub oracle_k: Option<Vec<usize>>,
    pub deriv_t0: Option<f64>,
    pub deriv_steps: Option<usize>,
    pub deriv_tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, s: &mut Scenario) {
        let o = &mut s.options;
        if let Some(v) = self.seed {
            o.seed = v;
        }
        if let Some(v) = self.tol {
            o.tol = v;
        }
        if let Some(v) = self.coords {
            o.coords = v;
        }
        if let Some(v) = self.psc_depth {
            o.psc_depth = v;
        }
        if let Some(v) = self.deriv_t0 {
            o.deriv.t0 = Some(v);
        }
        if let Some(v) = self.deriv_steps {
            o.deriv.steps = v;
        }
        if let Some(v) = self.deriv_tol {
            o.deriv.tol_match = v;
        }
        if let Some(ks) = &self.oracle_k {
            s.oracle_k = Some(ks.clone());
        }
    }
}

/// Minimum of the `k`-dimensional reduction against `f(x*)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRecord {
    pub k: usize,
    pub value: f64,
    pub reference: f64,
    pub minimizer: Vec<f64>,
    pub anchor: Vec<f64>,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub task: Task,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grade: Option<Grade>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    /// Per-coordinate derivative table.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub coordinates: Vec<CoordinateRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derivative: Option<GateauxDerivative>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub derivatives: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub oracle: Vec<OracleRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    /// Wall time; kept out of the JSON so reports are reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Match,
    Mismatch,
    Error,
}

impl Report {
    pub fn status(&self) -> Status {
        match self.pass {
            Some(true) => Status::Match,
            Some(false) => Status::Mismatch,
            None if self.error.is_some() => Status::Error,
            None if self.oracle.iter().any(|o| !o.agrees) => Status::Mismatch,
            None => Status::Match,
        }
    }
}

fn first_coordinates(c: &Certificate) -> Option<&[CoordinateRecord]> {
    if !c.evidence.coordinates.is_empty() {
        return Some(&c.evidence.coordinates);
    }
    c.evidence.checks.iter().find_map(first_coordinates)
}

fn oracle(
    s: &Scenario,
    f: &FunctionExpr,
    inequalities: &[FunctionExpr],
) -> Result<Vec<OracleRecord>> {
    let reference = evaluate(f, &s.point, s.options.series_tol)?.value;
    let ks = s
        .oracle_k
        .clone()
        .unwrap_or_else(|| DEFAULT_ORACLE_K.to_vec());
    ks.par_iter()
        .map(|&k| {
            let rp =
                build_reduced(f, &s.set, &s.space, &s.point, k)?.with_inequalities(inequalities)?;
            let m = minimize_reduced(&rp, &MinimizeOpts::default())?;
            Ok(OracleRecord {
                k,
                value: m.value,
                reference,
                agrees: (m.value - reference).abs() <= ORACLE_TOL,
                minimizer: m.y,
                anchor: rp.anchor_head(),
            })
        })
        .collect()
}

/// Existence of `f'(x*; e_n)` for `n <= N`, as a certificate.
fn profile_certificate(f: &FunctionExpr, s: &Scenario) -> Result<Certificate> {
    const CHECK: &str = "dir_profile";
    let o = &s.options;
    let rs = dir_deriv_profile(f, &s.point, o.coords, &o.deriv).map_err(|e| e.error)?;
    let coordinates: Vec<CoordinateRecord> = rs
        .iter()
        .enumerate()
        .map(|(i, r)| CoordinateRecord::from_result(i + 1, r))
        .collect();
    let grade = match tail_existence(f, &s.point) {
        Ok(Existence::AllExist) => Grade::AnalyticAllN,
        _ => Grade::NumericFirstN(o.coords),
    };
    let mut cert = match coordinates.iter().find(|c| !c.exists) {
        Some(c) => Certificate::fails(
            CHECK,
            Grade::NumericFirstN(o.coords),
            Witness::Coordinate {
                n: c.n,
                left: c.left,
                right: c.right,
                expected: f64::NAN,
            },
        )
        .with_reason(format!("f'(x*; e_{}) does not exist", c.n)),
        None => Certificate::holds(CHECK, grade).with_reason("every coordinate derivative exists"),
    };
    cert.evidence.coordinates = coordinates;
    Ok(cert)
}

struct Outcome {
    certificate: Certificate,
    derivative: Option<GateauxDerivative>,
    derivatives: Vec<f64>,
    oracle: Vec<OracleRecord>,
}

impl From<Certificate> for Outcome {
    fn from(certificate: Certificate) -> Self {
        Outcome {
            certificate,
            derivative: None,
            derivatives: Vec::new(),
            oracle: Vec::new(),
        }
    }
}

fn execute(s: &Scenario) -> Result<Outcome> {
    let o = &s.options;
    let function = || {
        s.function
            .as_ref()
            .ok_or_else(|| Error::Invalid("missing function".into()))
    };
    let outcome = match s.task {
        Task::CertifyMin => {
            let f = function()?;
            let c = certify_min(f, &s.set, &s.space, &s.point, &s.probes, o);
            let oracle = if c.passed() {
                oracle(s, f, &[])?
            } else {
                Vec::new()
            };
            Outcome { oracle, ..c.into() }
        }
        Task::Gateaux => {
            let (c, d) = gateaux_detect(function()?, &s.space, &s.point, &s.directions, o);
            Outcome {
                derivative: d,
                ..c.into()
            }
        }
        Task::Subgradient => {
            let p = s
                .dual
                .as_ref()
                .ok_or_else(|| Error::Invalid("missing dual".into()))?;
            subgradient_test(function()?, &s.space, &s.point, p, &s.probes, o).into()
        }
        Task::Kkt => {
            let f = function()?;
            let k = s
                .constraints
                .as_ref()
                .ok_or_else(|| Error::Invalid("missing constraints".into()))?;
            let c = kkt_certify(
                f,
                &k.inequalities,
                &k.equalities,
                &s.set,
                &s.space,
                &s.point,
                &k.lambda,
                &k.nu,
                o,
            )?;
            // the oracle handles inequality constraints only
            let oracle = if c.passed() && k.equalities.is_empty() {
                oracle(s, f, &k.inequalities)?
            } else {
                Vec::new()
            };
            Outcome { oracle, ..c.into() }
        }
        Task::Psc => check_psc(function()?, &s.set, &s.space, &s.point, &s.probes, o).into(),
        Task::Qualification => check_qualification(&s.set, &s.space, &s.point, o.coords).into(),
        Task::SeriesDiff => {
            let family = s
                .family
                .as_ref()
                .ok_or_else(|| Error::Invalid("missing family".into()))?;
            let r = series_differentiate(family, &s.point, s.radii.as_ref(), o)?;
            Outcome {
                derivatives: r.derivatives,
                ..r.certificate.into()
            }
        }
        Task::DirProfile => profile_certificate(function()?, s)?.into(),
    };
    Ok(outcome)
}

pub fn run_scenario(s: &Scenario) -> Report {
    let start = Instant::now();
    let mut warnings = Vec::new();
    if let Some(b) = s.beta {
        if b >= 2.0 / 3.0 {
            warnings.push(format!(
                "beta = {b} >= 2/3: the worked examples assume sum beta^n < 2"
            ));
        }
    }
    let mut report = Report {
        name: s.name.clone(),
        task: s.task,
        verdict: None,
        grade: None,
        error: None,
        certificate: None,
        coordinates: Vec::new(),
        derivative: None,
        derivatives: Vec::new(),
        oracle: Vec::new(),
        warnings,
        expected: s.expected,
        pass: None,
        elapsed: Duration::ZERO,
    };
    match execute(s) {
        Ok(out) => {
            report.verdict = Some(out.certificate.verdict);
            report.grade = Some(out.certificate.grade);
            report.coordinates = first_coordinates(&out.certificate)
                .map(<[_]>::to_vec)
                .unwrap_or_default();
            report.certificate = Some(out.certificate);
            report.derivative = out.derivative;
            report.derivatives = out.derivatives;
            report.oracle = out.oracle;
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    let oracle_ok = report.oracle.iter().all(|o| o.agrees);
    report.pass = s.expected.map(|e| e.matches(report.verdict) && oracle_ok);
    report.elapsed = start.elapsed();
    report
}

/// Runs scenarios concurrently; reports keep the input order.
pub fn run_all(scenarios: &[Scenario]) -> Vec<Report> {
    scenarios.par_iter().map(run_scenario).collect()
}

const TABLE_ROWS: usize = 8;

pub fn render_human(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "== {} [{}] ==", r.name, r.task.name());
    match (&r.certificate, &r.error) {
        (Some(c), _) => {
            let _ = writeln!(out, "verdict: {} [{}]", c.verdict, c.grade);
            if let Some(reason) = &c.reason {
                let _ = writeln!(out, "reason: {reason}");
            }
            if let Some(w) = &c.witness {
                let _ = writeln!(
                    out,
                    "witness: {}",
                    serde_json::to_string(w).unwrap_or_default()
                );
            }
            for sub in &c.evidence.checks {
                let _ = writeln!(out, "  {sub}");
            }
            for p in &c.evidence.probes {
                let mark = if p.ok { "ok" } else { "VIOLATION" };
                let _ = writeln!(
                    out,
                    "  probe {}: {} vs {} {mark}",
                    p.label, p.value, p.reference
                );
            }
            for (k, v) in &c.evidence.values {
                let _ = writeln!(out, "  {k} = {v}");
            }
        }
        (None, Some(e)) => {
            let _ = writeln!(out, "error: {e}");
        }
        (None, None) => {}
    }
    if !r.coordinates.is_empty() {
        let _ = writeln!(
            out,
            "  {:>4}  {:>14}  {:>14}  {:>14}  method",
            "n", "f'(x*;e_n)", "left", "right"
        );
        for c in r.coordinates.iter().take(TABLE_ROWS) {
            let value = c.value.map_or("-".to_string(), |v| format!("{v:.6e}"));
            let _ = writeln!(
                out,
                "  {:>4}  {:>14}  {:>14.6e}  {:>14.6e}  {:?}",
                c.n, value, c.left, c.right, c.method
            );
        }
        if r.coordinates.len() > TABLE_ROWS {
            let _ = writeln!(
                out,
                "  ... {} more coordinates",
                r.coordinates.len() - TABLE_ROWS
            );
        }
    }
    for o in &r.oracle {
        let mark = if o.agrees { "agrees" } else { "DISAGREES" };
        let _ = writeln!(
            out,
            "  oracle k = {}: min {:.9} vs f(x*) {:.9} {mark}",
            o.k, o.value, o.reference
        );
    }
    for w in &r.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    if let Some(e) = r.expected {
        let result = if r.pass == Some(true) { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "expected {e:?}: {result}");
    }
    let _ = writeln!(out, "time: {:.1} ms", r.elapsed.as_secs_f64() * 1e3);
    out
}
