//! Sufficient KKT conditions with supplied multipliers.

use super::certificate::{Certificate, Evidence, Grade};
use super::optimality::stationarity;
use super::psc::check_psc;
use super::qualification::check_qualification;
use super::set::SetDescriptor;
use super::CertifyOpts;
use crate::error::{Error, Result};
use crate::funcs::{evaluate, FunctionExpr};
use crate::seqspace::{DualPoint, Point, SpaceDescriptor};

const CHECK: &str = "kkt";

/// `f + sum lambda_j g_j + sum nu_k h_k`; the factors on `h_k` may be negative.
fn lagrangian(
    f: &FunctionExpr,
    gs: &[FunctionExpr],
    hs: &[FunctionExpr],
    lambda: &[f64],
    nu: &[f64],
) -> FunctionExpr {
    let mut terms = vec![f.clone()];
    for (g, &l) in gs.iter().zip(lambda) {
        if l != 0.0 {
            terms.push(FunctionExpr::Scale(l, Box::new(g.clone())));
        }
    }
    for (h, &v) in hs.iter().zip(nu) {
        if v != 0.0 {
            terms.push(FunctionExpr::Scale(v, Box::new(h.clone())));
        }
    }
    FunctionExpr::Sum(terms)
}

/// Certifies `x*` as a minimizer of `f` over
/// `{x in X : g_j(x) <= 0, h_k(x) = 0}` from the multipliers `lambda`, `nu`.
/// The conditions are sufficient only, so any failed check is INCONCLUSIVE.
#[allow(clippy::too_many_arguments)]
pub fn kkt_certify(
    f: &FunctionExpr,
    gs: &[FunctionExpr],
    hs: &[FunctionExpr],
    set: &SetDescriptor,
    space: &SpaceDescriptor,
    x: &Point,
    lambda: &[f64],
    nu: &[f64],
    opts: &CertifyOpts,
) -> Result<Certificate> {
    if lambda.len() != gs.len() || nu.len() != hs.len() {
        return Err(Error::Invalid(format!(
            "{} inequality multipliers for {} constraints, {} equality multipliers for {} constraints",
            lambda.len(),
            gs.len(),
            nu.len(),
            hs.len()
        )));
    }
    if let Some(l) = lambda.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
        return Err(Error::Invalid(format!(
            "inequality multiplier {l} is not a finite nonnegative number"
        )));
    }
    if let Some(v) = nu.iter().find(|v| !v.is_finite()) {
        return Err(Error::Invalid(format!(
            "equality multiplier {v} is not finite"
        )));
    }
    if let Some(n) = set.violation(space, x)? {
        return Err(Error::InfeasiblePoint(format!(
            "x* violates {} at coordinate {n}",
            set.name()
        )));
    }
    let mut evidence = Evidence::default();
    let mut gx = Vec::with_capacity(gs.len());
    for (j, g) in gs.iter().enumerate() {
        let v = evaluate(g, x, opts.series_tol)?.value;
        if v > opts.tol {
            return Err(Error::InfeasiblePoint(format!(
                "g_{} (x*) = {v} > 0",
                j + 1
            )));
        }
        gx.push(v);
    }
    let mut hx = Vec::with_capacity(hs.len());
    for (k, h) in hs.iter().enumerate() {
        let v = evaluate(h, x, opts.series_tol)?.value;
        if v.abs() > opts.tol {
            return Err(Error::InfeasiblePoint(format!(
                "h_{} (x*) = {v} != 0",
                k + 1
            )));
        }
        hx.push(v);
    }
    evidence
        .values
        .insert("f(x*)".into(), evaluate(f, x, opts.series_tol)?.value);
    evidence
        .multipliers
        .insert("lambda".into(), lambda.to_vec());
    evidence.multipliers.insert("nu".into(), nu.to_vec());
    evidence.multipliers.insert("g(x*)".into(), gx.clone());
    evidence.multipliers.insert("h(x*)".into(), hx);

    let mut failed = Vec::new();
    for (j, (l, v)) in lambda.iter().zip(&gx).enumerate() {
        if (l * v).abs() > opts.tol {
            failed.push(format!("lambda_{0} g_{0}(x*) = {1} != 0", j + 1, l * v));
        }
    }

    let qual = check_qualification(set, space, x, opts.coords);
    let mut checks = vec![qual];
    let named = std::iter::once(("f".to_string(), f))
        .chain(
            gs.iter()
                .enumerate()
                .map(|(j, g)| (format!("g_{}", j + 1), g)),
        )
        .chain(
            hs.iter()
                .enumerate()
                .map(|(k, h)| (format!("h_{}", k + 1), h)),
        );
    for (name, fun) in named {
        let mut c = check_psc(fun, set, space, x, &[], opts);
        c.check = format!("psc {name}");
        checks.push(c);
    }
    let lag = lagrangian(f, gs, hs, lambda, nu);
    checks.push(stationarity(
        &lag,
        x,
        &DualPoint::zero(),
        opts,
        "lagrangian_stationarity",
    ));

    let grade = checks
        .iter()
        .fold(Grade::AnalyticAllN, |g, c| g.meet(c.grade));
    failed.extend(
        checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| format!("{} {}", c.check, c.verdict)),
    );
    let cert = if failed.is_empty() {
        Certificate::holds(CHECK, grade)
            .with_reason("complementary slackness and Lagrangian stationarity hold; x* minimizes f over the constrained set")
    } else {
        Certificate::inconclusive(CHECK, grade, failed.join(", "))
    };
    evidence.checks = checks;
    Ok(cert.with_evidence(evidence))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::Verdict;
    use crate::funcs::{lower_bound_constraint, weighted_square};

    fn run(x: &Point, lambda: f64) -> Result<Certificate> {
        kkt_certify(
            &weighted_square(0.5).unwrap(),
            &[lower_bound_constraint(1, 1.0).unwrap()],
            &[],
            &SetDescriptor::WholeSpace,
            &SpaceDescriptor::ell1(),
            x,
            &[lambda],
            &[],
            &CertifyOpts::default(),
        )
    }

    #[test]
    fn correct_multiplier_holds() {
        let c = run(&Point::basis(1), 1.0).unwrap();
        assert_eq!(
            (c.verdict, c.grade),
            (Verdict::Holds, Grade::AnalyticAllN),
            "{c}"
        );
        assert_eq!(c.evidence.values["f(x*)"], 0.5);
    }

    #[test]
    fn zero_multiplier_is_inconclusive() {
        let c = run(&Point::basis(1), 0.0).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert!(c.find("lagrangian_stationarity").unwrap().failed());
    }

    #[test]
    fn infeasible_point_is_an_error() {
        assert!(matches!(
            run(&Point::zero(), 1.0),
            Err(Error::InfeasiblePoint(_))
        ));
        assert!(matches!(
            run(&Point::basis(1), -1.0),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn equality_multiplier_may_be_negative() {
        // min sum 2^-n x_n^2 subject to x_1 - 1 = 0: nu = -1
        let h = FunctionExpr::affine(DualPoint::coordinate_functional(1), -1.0).unwrap();
        let c = kkt_certify(
            &weighted_square(0.5).unwrap(),
            &[],
            &[h],
            &SetDescriptor::WholeSpace,
            &SpaceDescriptor::ell1(),
            &Point::basis(1),
            &[],
            &[-1.0],
            &CertifyOpts::default(),
        )
        .unwrap();
        assert_eq!(c.verdict, Verdict::Holds, "{c}");
    }
}
