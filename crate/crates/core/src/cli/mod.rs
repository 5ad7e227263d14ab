//! Scenario runner behind the `seqcert` binary.

mod builtins;
mod report;
mod scenario;

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};

pub use builtins::{builtin, BUILTINS, DEFAULT_BETA};
pub use report::{
    render_human, run_all, run_scenario, OracleRecord, Overrides, Report, Status, ORACLE_TOL,
};
pub use scenario::{load_scenarios, parse_scenarios, Constraints, Expected, Scenario, Task};

pub const EXIT_MATCH: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "seqcert",
    version,
    about = "Certify minimizers, subgradients and Gateaux derivatives on sequence spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario file (one scenario or an array) or a builtin.
    Run(RunArgs),
    /// List the builtin scenarios.
    List,
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// Path to a scenario JSON file, or a builtin name.
    pub target: String,
    /// Also write the JSON report to this path.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Coordinates checked when a claim can only be sampled.
    #[arg(long)]
    pub coords: Option<usize>,
    /// Truncation depth for sampled pseudo-semicontinuity.
    #[arg(long)]
    pub psc_depth: Option<usize>,
    /// Oracle dimensions, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub oracle_k: Option<Vec<usize>>,
    #[arg(long)]
    pub deriv_t0: Option<f64>,
    #[arg(long)]
    pub deriv_steps: Option<usize>,
    #[arg(long)]
    pub deriv_tol: Option<f64>,
    /// Parameter of the builtin examples.
    #[arg(long, default_value_t = DEFAULT_BETA)]
    pub beta: f64,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            tol: self.tol,
            coords: self.coords,
            psc_depth: self.psc_depth,
            oracle_k: self.oracle_k.clone(),
            deriv_t0: self.deriv_t0,
            deriv_steps: self.deriv_steps,
            deriv_tol: self.deriv_tol,
        }
    }
}

/// Builtin scenarios by name, otherwise the file at `target`.
pub fn resolve(target: &str, beta: f64) -> anyhow::Result<Vec<Scenario>> {
    match builtin(target, beta) {
        Some(s) => Ok(s?),
        None if Path::new(target).exists() => load_scenarios(Path::new(target)),
        None => anyhow::bail!("{target:?} is neither a builtin nor a readable file"),
    }
}

pub fn reports_json(reports: &[Report]) -> String {
    let mut s = serde_json::to_string_pretty(&serde_json::json!({ "reports": reports }))
        .expect("serializable");
    s.push('\n');
    s
}

pub fn exit_code(reports: &[Report]) -> i32 {
    match reports.iter().map(Report::status).max() {
        Some(Status::Error) => EXIT_ERROR,
        Some(Status::Mismatch) => EXIT_MISMATCH,
        _ => EXIT_MATCH,
    }
}

fn run(args: &RunArgs, out: &mut impl Write) -> anyhow::Result<i32> {
    let mut scenarios = resolve(&args.target, args.beta)?;
    let overrides = args.overrides();
    for s in &mut scenarios {
        overrides.apply(s);
        s.validate()?;
    }
    let reports = run_all(&scenarios);
    for r in &reports {
        writeln!(out, "{}", render_human(r))?;
    }
    if let Some(path) = &args.json {
        std::fs::write(path, reports_json(&reports))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let code = exit_code(&reports);
    let matched = reports
        .iter()
        .filter(|r| r.status() == Status::Match)
        .count();
    writeln!(out, "{matched}/{} scenarios matched", reports.len())?;
    Ok(code)
}

/// Entry point; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::List => {
            for (name, about) in BUILTINS {
                let _ = writeln!(out, "{name}: {about}");
            }
            EXIT_MATCH
        }
        Command::Run(args) => match run(&args, &mut out) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e:#}");
                EXIT_ERROR
            }
        },
    }
}
