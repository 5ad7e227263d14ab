//! Pseudo-semicontinuity: `limsup_k f(x* + P^k(x - x*)) <= f(x)` for every
//! `x` of the feasible set.
//!
//! Separable and linear parts of the grammar converge along truncations, and
//! the limsup part never sees them, so for grammar functions the condition
//! reduces to `L * limsup|x*_n| <= L * inf_X limsup|x_n|` with `L` the total
//! limsup weight.

use super::certificate::{Certificate, Evidence, Grade, ProbeRecord, Witness};
use super::set::SetDescriptor;
use super::{probe_list, CertifyOpts};
use crate::funcs::{evaluate, evaluate_ext, is_continuous, FunctionExpr};
use crate::seqspace::{Point, SignPattern, SpaceDescriptor, Tail};

const CHECK: &str = "psc";

pub fn check_psc(
    f: &FunctionExpr,
    set: &SetDescriptor,
    space: &SpaceDescriptor,
    x: &Point,
    probes: &[Point],
    opts: &CertifyOpts,
) -> Certificate {
    if space.basis_is_topological && is_continuous(f, space) {
        return Certificate::holds(CHECK, Grade::AnalyticAllN).with_reason(format!(
            "f is continuous on {space}, whose coordinate basis is topological"
        ));
    }
    let weight = f.limsup_weight();
    if weight == 0.0 {
        return Certificate::holds(CHECK, Grade::AnalyticAllN)
            .with_reason("no limsup part; separable and linear parts converge along truncations");
    }
    match structural(f, set, x, weight, opts) {
        Some(c) => c,
        None => sampled(f, set, space, x, probes, opts),
    }
}

/// `argmin_X limsup|x_n|`, when it has a closed form.
fn limsup_minimizer(set: &SetDescriptor) -> Option<Point> {
    match set {
        SetDescriptor::WholeSpace | SetDescriptor::PositiveConeEll1 => Some(Point::zero()),
        SetDescriptor::Box { lower, upper } => {
            // coordinate-wise projection of 0 onto [l_n, u_n]
            let ls = lower.tail().eventual_sign()?;
            let us = upper.tail().eventual_sign()?;
            let tail = match (ls.pattern, us.pattern) {
                (SignPattern::Positive, _) => lower.tail().clone(),
                (_, SignPattern::Negative) => upper.tail().clone(),
                (
                    SignPattern::Negative | SignPattern::Zero,
                    SignPattern::Positive | SignPattern::Zero,
                ) => Tail::zero(),
                _ => return None,
            };
            let m = lower
                .prefix_len()
                .max(upper.prefix_len())
                .max(ls.settled_after)
                .max(us.settled_after);
            let prefix = (1..=m)
                .map(|n| 0f64.clamp(lower.coordinate(n), upper.coordinate(n)))
                .collect();
            Point::new(prefix, tail).ok()
        }
    }
}

fn structural(
    f: &FunctionExpr,
    set: &SetDescriptor,
    x: &Point,
    weight: f64,
    opts: &CertifyOpts,
) -> Option<Certificate> {
    let w = limsup_minimizer(set)?;
    let fw = evaluate(f, &w, opts.series_tol).ok()?.value;
    let px = x.tail().limsup_abs();
    let pw = w.tail().limsup_abs();
    let mut evidence = Evidence::default();
    evidence.values.insert("limsup weight".into(), weight);
    evidence.values.insert("p(x*)".into(), px);
    evidence.values.insert("inf p over X".into(), pw);
    if px <= pw {
        return Some(
            Certificate::holds(CHECK, Grade::AnalyticAllN)
                .with_reason("limsup part attains its infimum over X at x*")
                .with_evidence(evidence),
        );
    }
    // f(x* + P^k(w - x*)) -> f(w) + weight * (p(x*) - p(w)) as k grows
    let mut k = opts.psc_depth.max(1);
    let mut truncated = f64::NAN;
    for _ in 0..8 {
        truncated = evaluate_ext(f, &w.project(k, x), opts.series_tol)
            .ok()?
            .value;
        if truncated > fw + opts.tol {
            break;
        }
        k *= 2;
    }
    evidence.values.insert("f(w)".into(), fw);
    evidence
        .values
        .insert("f(x* + P^k(w - x*))".into(), truncated);
    let witness = Witness::Truncation {
        label: "argmin of the limsup part".into(),
        point: w,
        k,
        truncated_value: truncated,
        value: fw,
    };
    Some(
        Certificate::fails(CHECK, Grade::AnalyticAllN, witness)
            .with_reason(format!(
                "limsup part is {px} at x* but {pw} at the witness; truncations keep the tail of x*"
            ))
            .with_evidence(evidence),
    )
}

fn sampled(
    f: &FunctionExpr,
    set: &SetDescriptor,
    space: &SpaceDescriptor,
    x: &Point,
    probes: &[Point],
    opts: &CertifyOpts,
) -> Certificate {
    let depth = opts.psc_depth.max(2);
    let mut evidence = Evidence::default();
    for (label, p) in probe_list(probes, set, space, x, opts) {
        let fp = match evaluate_ext(f, &p, opts.series_tol) {
            Ok(v) => v.value,
            Err(e) => {
                evidence.notes.push(format!("{label}: {e}"));
                continue;
            }
        };
        let mut worst = (depth / 2, f64::NEG_INFINITY);
        for k in depth / 2..=depth {
            match evaluate_ext(f, &p.project(k, x), opts.series_tol) {
                Ok(v) if v.value > worst.1 => worst = (k, v.value),
                Ok(_) => {}
                Err(e) => {
                    evidence.notes.push(format!("{label}, k = {k}: {e}"));
                }
            }
        }
        let ok = worst.1 <= fp + opts.tol;
        evidence.probes.push(ProbeRecord {
            label: label.clone(),
            value: worst.1,
            reference: fp,
            ok,
            note: Some(format!(
                "max over k in [{}, {depth}] at k = {}",
                depth / 2,
                worst.0
            )),
        });
        if !ok {
            let witness = Witness::Truncation {
                label,
                point: p,
                k: worst.0,
                truncated_value: worst.1,
                value: fp,
            };
            return Certificate::fails(CHECK, Grade::NumericFirstN(depth), witness)
                .with_evidence(evidence);
        }
    }
    Certificate::holds(CHECK, Grade::NumericFirstN(depth))
        .with_reason("truncations of every probe stay below its value")
        .with_evidence(evidence)
}
