//! Minimality over a feasible set and subgradient membership, both decided
//! through the coordinate derivatives `f'(x*; e_n)`.

use num_traits::Zero;

use super::certificate::{
    Certificate, CoordinateRecord, Evidence, Grade, ProbeRecord, Verdict, Witness,
};
use super::psc::check_psc;
use super::qualification::check_qualification;
use super::set::SetDescriptor;
use super::{default_probes, CertifyOpts};
use crate::derivative::dir_deriv_profile;
use crate::funcs::symbolic::ClosedForm;
use crate::funcs::{
    analytic_dir_deriv, check_domain, derivative_form, evaluate, evaluate_ext, one_sided,
    FunctionExpr,
};
use crate::seqspace::{DualPoint, Point, SpaceDescriptor};

/// How far past the closed-form threshold to look for a nonzero coordinate.
const WITNESS_SCAN: usize = 10_000;

/// Whether a coordinate witness shows the required value outside the
/// interval of one-sided derivatives, which refutes the claim outright.
fn excluded(w: &Witness, tol: f64) -> bool {
    match w {
        Witness::Coordinate {
            left,
            right,
            expected,
            ..
        } => *expected < left - tol || *expected > right + tol,
        _ => false,
    }
}

fn coordinate_witness(f: &FunctionExpr, x: &Point, n: usize, expected: f64) -> Witness {
    let (left, right) = one_sided(f, x, n);
    Witness::Coordinate {
        n,
        left,
        right,
        expected,
    }
}

/// `f'(x*; e_n) = p_n` for every `n`.
pub(crate) fn stationarity(
    f: &FunctionExpr,
    x: &Point,
    p: &DualPoint,
    opts: &CertifyOpts,
    check: &str,
) -> Certificate {
    if let Err(e) = check_domain(f, x) {
        return Certificate::inconclusive(check, Grade::NumericFirstN(0), e.to_string());
    }
    let mut evidence = Evidence::default();
    let profile = dir_deriv_profile(f, x, opts.coords, &opts.deriv);
    match &profile {
        Ok(rs) => {
            evidence.coordinates = rs
                .iter()
                .enumerate()
                .map(|(i, r)| CoordinateRecord::from_result(i + 1, r))
                .collect()
        }
        Err(e) => evidence.notes.push(e.to_string()),
    }

    if let Some(c) = symbolic(f, x, p, opts, check, &mut evidence) {
        return c.with_evidence(evidence);
    }

    let grade = Grade::NumericFirstN(opts.coords);
    let rs = match profile {
        Ok(rs) => rs,
        Err(e) => {
            return Certificate::inconclusive(check, grade, e.to_string()).with_evidence(evidence)
        }
    };
    for (i, r) in rs.iter().enumerate() {
        let n = i + 1;
        let expected = p.coordinate(n);
        let ok = r.value.is_some_and(|v| (v - expected).abs() <= opts.tol);
        if !ok {
            let witness = Witness::Coordinate {
                n,
                left: r.left,
                right: r.right,
                expected,
            };
            return Certificate::fails(check, grade, witness).with_evidence(evidence);
        }
    }
    Certificate::holds(check, grade)
        .with_reason("no closed form in n; coordinates checked individually")
        .with_evidence(evidence)
}

/// Exact check through closed forms; `None` when no closed form is available.
fn symbolic(
    f: &FunctionExpr,
    x: &Point,
    p: &DualPoint,
    opts: &CertifyOpts,
    check: &str,
    evidence: &mut Evidence,
) -> Option<Certificate> {
    let df = derivative_form(f, x)?;
    let target = ClosedForm::from_tail(p.as_point().tail())?;
    let valid_after = df.valid_after.max(p.as_point().prefix_len());
    evidence.forms.insert(
        "f'(x*; e_n)".into(),
        format!("{} for n > {}", df.form, df.valid_after),
    );
    let grade = Grade::AnalyticAllN;
    for n in 1..=valid_after {
        let expected = p.coordinate(n);
        let ok = analytic_dir_deriv(f, x, n)
            .ok()?
            .value()
            .is_some_and(|v| (v - expected).abs() <= opts.tol);
        if !ok {
            return Some(Certificate::fails(
                check,
                grade,
                coordinate_witness(f, x, n, expected),
            ));
        }
    }
    let diff = df
        .form
        .add(&target.scale(&-num_rational::BigRational::from_integer(1.into())));
    if diff.is_zero() {
        return Some(Certificate::holds(check, grade).with_reason(format!(
            "closed form of f'(x*; e_n) - p_n vanishes identically beyond n = {valid_after}"
        )));
    }
    evidence
        .forms
        .insert("f'(x*; e_n) - p_n".into(), diff.to_string());
    let range = valid_after + 1..=valid_after + WITNESS_SCAN;
    let n = range
        .clone()
        .find(|&n| diff.value(n).abs() > opts.tol)
        .or_else(|| range.clone().find(|&n| !diff.value(n).is_zero()))?;
    Some(Certificate::fails(
        check,
        grade,
        coordinate_witness(f, x, n, p.coordinate(n)),
    ))
}

fn probe_log(
    f: &FunctionExpr,
    fx: f64,
    probes: Vec<(String, Point)>,
    opts: &CertifyOpts,
    evidence: &mut Evidence,
) -> Option<Witness> {
    let mut witness = None;
    for (label, p) in probes {
        match evaluate_ext(f, &p, opts.series_tol) {
            Ok(v) => {
                let ok = v.value >= fx - opts.tol;
                evidence.probes.push(ProbeRecord {
                    label: label.clone(),
                    value: v.value,
                    reference: fx,
                    ok,
                    note: None,
                });
                if !ok && witness.is_none() {
                    witness = Some(Witness::Probe {
                        label,
                        point: p,
                        value: v.value,
                        reference: fx,
                    });
                }
            }
            Err(e) => evidence.notes.push(format!("probe {label}: {e}")),
        }
    }
    witness
}

/// Whether `x*` minimizes `f` over `X`.
pub fn certify_min(
    f: &FunctionExpr,
    set: &SetDescriptor,
    space: &SpaceDescriptor,
    x: &Point,
    probes: &[Point],
    opts: &CertifyOpts,
) -> Certificate {
    const CHECK: &str = "certify_min";
    let mut evidence = Evidence::default();
    let fx = match evaluate(f, x, opts.series_tol) {
        Ok(v) => v.value,
        Err(e) => {
            return Certificate::inconclusive(CHECK, Grade::NumericFirstN(0), format!("f(x*): {e}"))
        }
    };
    evidence.values.insert("f(x*)".into(), fx);

    let qual = check_qualification(set, space, x, opts.coords);
    if let Some(Witness::NotInSet { n }) = qual.witness {
        return Certificate::fails(CHECK, qual.grade, Witness::NotInSet { n })
            .with_reason("x* is not feasible")
            .with_evidence(Evidence {
                checks: vec![qual],
                ..evidence
            });
    }
    let psc = check_psc(f, set, space, x, probes, opts);
    let stat = stationarity(f, x, &DualPoint::zero(), opts, "stationarity");

    let mut all_probes = default_probes(set, space, x, opts);
    all_probes.extend(
        probes
            .iter()
            .enumerate()
            .filter(|(_, p)| set.contains(space, p).unwrap_or(false))
            .map(|(i, p)| (format!("probe {i}"), p.clone())),
    );
    let probe_witness = probe_log(f, fx, all_probes, opts, &mut evidence);

    let grade = qual.grade.meet(psc.grade).meet(stat.grade);
    let hypotheses = qual.passed() && psc.passed();
    let mut cert = if let Some(w) = probe_witness {
        Certificate::fails(CHECK, grade, w).with_reason("a feasible probe has a smaller value")
    } else if stat.failed()
        && hypotheses
        && stat.witness.as_ref().is_some_and(|w| excluded(w, opts.tol))
    {
        let w = stat.witness.clone().expect("FAILS carries a witness");
        Certificate::fails(CHECK, grade, w).with_reason("x* is not stationary along a coordinate")
    } else if stat.passed() && hypotheses {
        Certificate::holds(CHECK, grade)
            .with_reason("qualified, pseudo-semicontinuous and stationary")
    } else {
        let mut missing = Vec::new();
        for c in [&qual, &psc, &stat] {
            if !c.passed() {
                missing.push(format!("{} {}", c.check, c.verdict));
            }
        }
        Certificate::inconclusive(CHECK, grade, missing.join(", "))
    };
    evidence.checks = vec![qual, psc, stat];
    cert.evidence = evidence;
    cert
}

/// Whether `p` is a subgradient of `f` at `x*`.
pub fn subgradient_test(
    f: &FunctionExpr,
    space: &SpaceDescriptor,
    x: &Point,
    p: &DualPoint,
    probes: &[Point],
    opts: &CertifyOpts,
) -> Certificate {
    const CHECK: &str = "subgradient";
    if !space.dual_contains(p) {
        return Certificate::inconclusive(
            CHECK,
            Grade::NumericFirstN(0),
            format!("p is not a continuous linear functional on {space}"),
        );
    }
    let psc = check_psc(f, &SetDescriptor::WholeSpace, space, x, probes, opts);
    let stat = stationarity(f, x, p, opts, "coordinate_match");
    let grade = psc.grade.meet(stat.grade);
    let mut cert = match (stat.verdict, psc.verdict) {
        (Verdict::Holds, Verdict::Holds) => {
            Certificate::holds(CHECK, grade).with_reason("f'(x*; e_n) = p_n for every n")
        }
        (Verdict::Fails, _) => {
            let w = stat.witness.clone().expect("FAILS carries a witness");
            let outside = excluded(&w, opts.tol);
            if outside {
                Certificate::fails(CHECK, grade, w)
                    .with_reason("p_n lies outside [f'_-(x*; e_n), f'_+(x*; e_n)]")
            } else {
                Certificate::inconclusive(
                    CHECK,
                    grade,
                    "a coordinate derivative does not exist at x*",
                )
            }
        }
        _ => Certificate::inconclusive(
            CHECK,
            grade,
            format!("psc {}, coordinate_match {}", psc.verdict, stat.verdict),
        ),
    };
    cert.evidence.checks = vec![psc, stat];
    cert
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::{
        example3_minimizer, example3_objective, example4_minimizer, example4_objective,
        example5_objective, l1_norm, weighted_square,
    };
    use crate::seqspace::TailRule;

    #[test]
    fn example3_is_certified() {
        let c = certify_min(
            &example3_objective(0.5).unwrap(),
            &SetDescriptor::WholeSpace,
            &SpaceDescriptor::ellinf(),
            &example3_minimizer(),
            &[],
            &CertifyOpts::default(),
        );
        assert_eq!(c.verdict, Verdict::Holds, "{c}");
        assert_eq!(c.find("stationarity").unwrap().grade, Grade::AnalyticAllN);
        assert!((c.evidence.values["f(x*)"] + 0.145560).abs() < 1e-5);
    }

    #[test]
    fn example4_is_certified() {
        let c = certify_min(
            &example4_objective(0.5).unwrap(),
            &SetDescriptor::PositiveConeEll1,
            &SpaceDescriptor::ell1(),
            &example4_minimizer(0.5).unwrap(),
            &[],
            &CertifyOpts::default(),
        );
        assert_eq!(c.verdict, Verdict::Holds, "{c}");
        assert_eq!(c.grade, Grade::AnalyticAllN);
    }

    #[test]
    fn example5_fails_with_half_probe() {
        let c = certify_min(
            &example5_objective(0.5).unwrap(),
            &SetDescriptor::WholeSpace,
            &SpaceDescriptor::ellinf(),
            &Point::constant(1.0),
            &[],
            &CertifyOpts::default(),
        );
        assert_eq!(c.verdict, Verdict::Fails);
        assert!(c.find("stationarity").unwrap().passed());
        assert!(c.find("psc").unwrap().failed());
        match c.witness {
            Some(Witness::Probe {
                point,
                value,
                reference,
                ..
            }) => {
                assert!(point.seq_eq(&Point::constant(0.5)));
                assert!((value + 0.25).abs() < 1e-9);
                assert!(reference.abs() < 1e-9);
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn nonstationary_point_fails_with_coordinate() {
        let c = certify_min(
            &weighted_square(0.5).unwrap(),
            &SetDescriptor::WholeSpace,
            &SpaceDescriptor::ell1(),
            &Point::basis(1),
            &[],
            &CertifyOpts::default(),
        );
        assert_eq!(c.verdict, Verdict::Fails);
    }

    #[test]
    fn subgradient_examples() {
        let f = weighted_square(0.5).unwrap();
        let space = SpaceDescriptor::ell1();
        let opts = CertifyOpts::default();
        let e1 = Point::basis(1);
        let p = DualPoint::coordinate_functional(1);
        assert_eq!(
            subgradient_test(&f, &space, &e1, &p, &[], &opts).verdict,
            Verdict::Holds
        );
        assert_eq!(
            subgradient_test(&f, &space, &Point::zero(), &DualPoint::zero(), &[], &opts).verdict,
            Verdict::Holds
        );
        let c = subgradient_test(&f, &space, &e1, &DualPoint::zero(), &[], &opts);
        assert_eq!(c.verdict, Verdict::Fails);
        assert!(matches!(c.witness, Some(Witness::Coordinate { n: 1, .. })));
    }

    #[test]
    fn kink_inside_the_interval_is_inconclusive() {
        // p_2 = 0 lies in [-1, 1], the subdifferential of |.| at 0
        let x = Point::from_rule(vec![1.0, 0.0], TailRule::Geometric(1.0, 0.5));
        let p = DualPoint::new(Point::from_rule(vec![1.0, 0.0], TailRule::Const(1.0)));
        let opts = CertifyOpts::default();
        let c = subgradient_test(&l1_norm(), &SpaceDescriptor::ell1(), &x, &p, &[], &opts);
        assert_eq!(c.verdict, Verdict::Inconclusive);
        let q = DualPoint::new(Point::from_rule(vec![1.0, 2.0], TailRule::Const(1.0)));
        let c = subgradient_test(&l1_norm(), &SpaceDescriptor::ell1(), &x, &q, &[], &opts);
        assert_eq!(c.verdict, Verdict::Fails);
        assert!(matches!(c.witness, Some(Witness::Coordinate { n: 2, .. })));
    }

    #[test]
    fn kink_at_minimizer_is_not_refuted() {
        let c = certify_min(
            &l1_norm(),
            &SetDescriptor::WholeSpace,
            &SpaceDescriptor::ell1(),
            &Point::zero(),
            &[],
            &CertifyOpts::default(),
        );
        assert_eq!(c.verdict, Verdict::Inconclusive, "{c}");
    }
}
