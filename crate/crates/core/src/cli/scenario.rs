//! Scenario files: typed problem descriptions loaded with path diagnostics.

use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use crate::certify::{CertifyOpts, SeriesFamily, SetDescriptor, Verdict};
use crate::funcs::FunctionExpr;
use crate::seqspace::{DualPoint, Point, SpaceDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    CertifyMin,
    Gateaux,
    Subgradient,
    Kkt,
    Psc,
    Qualification,
    SeriesDiff,
    DirProfile,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::CertifyMin => "certify_min",
            Task::Gateaux => "gateaux",
            Task::Subgradient => "subgradient",
            Task::Kkt => "kkt",
            Task::Psc => "psc",
            Task::Qualification => "qualification",
            Task::SeriesDiff => "series_diff",
            Task::DirProfile => "dir_profile",
        }
    }
}

/// Expected outcome in regression mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Expected {
    Holds,
    Fails,
    Inconclusive,
    /// The task returns an error instead of a certificate.
    Error,
}

impl Expected {
    pub fn matches(self, verdict: Option<Verdict>) -> bool {
        matches!(
            (self, verdict),
            (Expected::Holds, Some(Verdict::Holds))
                | (Expected::Fails, Some(Verdict::Fails))
                | (Expected::Inconclusive, Some(Verdict::Inconclusive))
                | (Expected::Error, None)
        )
    }
}

/// Constraints `g_j <= 0`, `h_k = 0` and their multipliers.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraints {
    #[serde(default)]
    pub inequalities: Vec<FunctionExpr>,
    #[serde(default)]
    pub equalities: Vec<FunctionExpr>,
    #[serde(default)]
    pub lambda: Vec<f64>,
    #[serde(default)]
    pub nu: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub space: SpaceDescriptor,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionExpr>,
    pub point: Point,
    #[serde(default)]
    pub set: SetDescriptor,
    /// Extra points of the feasible set for probing.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<Point>,
    /// Candidate subgradient.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<DualPoint>,
    /// Non-basis directions tried as Gateaux refutations.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub directions: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<SeriesFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<Constraints>,
    /// Parameter the function was built from; recorded and range-checked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Truncation dimensions for the brute-force cross-check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_k: Option<Vec<usize>>,
    #[serde(default)]
    pub options: CertifyOpts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
}

impl Scenario {
    /// A scenario with the fields every task needs and defaults elsewhere.
    pub fn new(
        name: &str,
        space: SpaceDescriptor,
        task: Task,
        function: Option<FunctionExpr>,
        point: Point,
    ) -> Self {
        Scenario {
            name: name.to_string(),
            space,
            task,
            function,
            point,
            set: SetDescriptor::WholeSpace,
            probes: Vec::new(),
            dual: None,
            directions: Vec::new(),
            family: None,
            radii: None,
            constraints: None,
            beta: None,
            oracle_k: None,
            options: CertifyOpts::default(),
            expected: None,
        }
    }

    /// Task-specific field requirements that serde cannot express.
    pub fn validate(&self) -> anyhow::Result<()> {
        let needs_function = !matches!(self.task, Task::Qualification | Task::SeriesDiff);
        if needs_function && self.function.is_none() {
            bail!(
                "scenario {:?}: task {} requires `function`",
                self.name,
                self.task.name()
            );
        }
        match self.task {
            Task::Subgradient if self.dual.is_none() => {
                bail!("scenario {:?}: task subgradient requires `dual`", self.name)
            }
            Task::SeriesDiff if self.family.is_none() => {
                bail!(
                    "scenario {:?}: task series_diff requires `family`",
                    self.name
                )
            }
            Task::Kkt if self.constraints.is_none() => {
                bail!("scenario {:?}: task kkt requires `constraints`", self.name)
            }
            _ => {}
        }
        if let Some(ks) = &self.oracle_k {
            if ks.contains(&0) {
                bail!(
                    "scenario {:?}: oracle dimensions must be at least 1",
                    self.name
                );
            }
        }
        Ok(())
    }
}

/// Parses a single scenario object or an array of them.
pub fn parse_scenarios(text: &str) -> anyhow::Result<Vec<Scenario>> {
    let batch = text.trim_start().starts_with('[');
    let mut de = serde_json::Deserializer::from_str(text);
    let scenarios = if batch {
        serde_path_to_error::deserialize::<_, Vec<Scenario>>(&mut de)
    } else {
        serde_path_to_error::deserialize::<_, Scenario>(&mut de).map(|s| vec![s])
    };
    let scenarios = scenarios.map_err(|e| {
        let path = e.path().to_string();
        anyhow::anyhow!("at `{path}`: {}", e.into_inner())
    })?;
    de.end().context("trailing characters after the scenario")?;
    for s in &scenarios {
        s.validate()?;
    }
    Ok(scenarios)
}

pub fn load_scenarios(path: &Path) -> anyhow::Result<Vec<Scenario>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_scenarios(&text).with_context(|| format!("parsing {}", path.display()))
}
