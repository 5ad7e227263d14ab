//! Term-wise differentiation of `f = sum_k f_k` along the coordinate
//! directions.

use serde::{Deserialize, Serialize};

use super::certificate::{Certificate, Evidence, Grade, Witness};
use super::CertifyOpts;
use crate::error::{Error, Result};
use crate::funcs::{
    analytic_dir_deriv, check_domain, derivative_envelope, derivative_form, evaluate, one_sided,
    Coef, FunctionExpr, ScalarConvex,
};
use crate::seqspace::{Envelope, Point};

const CHECK: &str = "series_diff";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeriesFamily {
    /// Finitely many terms `f_1, ..., f_m`.
    Terms { terms: Vec<FunctionExpr> },
    /// `f_k(x) = w_k u_k(x_k)` for every `k >= 1`.
    Separable { weight: Coef, inner: ScalarConvex },
}

impl SeriesFamily {
    pub fn sum(&self) -> Result<FunctionExpr> {
        match self {
            SeriesFamily::Terms { terms } => Ok(FunctionExpr::Sum(terms.clone())),
            SeriesFamily::Separable { weight, inner } => FunctionExpr::separable(*weight, *inner),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesDiff {
    pub certificate: Certificate,
    /// `sum_k f_k'(x*; e_n)` for `n = 1..=N`.
    pub derivatives: Vec<f64>,
}

#[derive(Clone, Copy)]
enum Kink {
    /// Needs `|x_n| >= a_n`.
    Abs,
    /// Needs `x_n >= a_n`.
    Sqrt,
}

fn kinks(f: &FunctionExpr) -> Vec<Kink> {
    let mut out = Vec::new();
    f.for_each_leaf(|lambda, leaf| {
        if let FunctionExpr::Separable { weight, inner } = leaf {
            if lambda == 0.0 || weight.is_zero() {
                return;
            }
            match inner {
                ScalarConvex::Abs => out.push(Kink::Abs),
                ScalarConvex::NegSqrt { .. } => out.push(Kink::Sqrt),
                _ => {}
            }
        }
    });
    out
}

fn coordinate_fail(
    f: &FunctionExpr,
    x: &Point,
    n: usize,
    grade: Grade,
    why: String,
) -> Certificate {
    let (left, right) = one_sided(f, x, n);
    Certificate::fails(
        CHECK,
        grade,
        Witness::Coordinate {
            n,
            left,
            right,
            expected: f64::NAN,
        },
    )
    .with_reason(why)
}

/// Condition (i): every `f_k'(x; e_n)` exists on `{x* + t e_n : |t| < a_n}`.
/// With default radii `a_n = |x*_n| / 2` (or `1` without kinks) this is
/// decided from the sign pattern of `x*`.
#[allow(clippy::result_large_err)]
fn interval_existence(
    f: &FunctionExpr,
    x: &Point,
    radii: Option<&Point>,
    opts: &CertifyOpts,
) -> std::result::Result<Grade, Certificate> {
    let ks = kinks(f);
    match radii {
        None => {
            let mut grade = Grade::AnalyticAllN;
            for k in &ks {
                let found = match k {
                    Kink::Abs => x.first_zero(),
                    Kink::Sqrt => x.first_nonpositive(),
                };
                match found {
                    Ok(None) => {}
                    Ok(Some(n)) => {
                        return Err(coordinate_fail(
                            f,
                            x,
                            n,
                            Grade::AnalyticAllN,
                            format!(
                            "a term has a kink at x*_{n}, so no interval around it is admissible"
                        ),
                        ))
                    }
                    Err(_) => {
                        grade = Grade::NumericFirstN(opts.coords);
                        let bad = (1..=opts.coords).find(|&n| match k {
                            Kink::Abs => x.coordinate(n) == 0.0,
                            Kink::Sqrt => x.coordinate(n) <= 0.0,
                        });
                        if let Some(n) = bad {
                            return Err(coordinate_fail(
                                f,
                                x,
                                n,
                                grade,
                                format!("a term has a kink at x*_{n}"),
                            ));
                        }
                    }
                }
            }
            Ok(grade)
        }
        Some(a) => {
            let grade = Grade::NumericFirstN(opts.coords);
            for n in 1..=opts.coords {
                let (an, xn) = (a.coordinate(n), x.coordinate(n));
                if an <= 0.0 {
                    return Err(Certificate::inconclusive(
                        CHECK,
                        grade,
                        format!("radius a_{n} = {an} is not positive"),
                    ));
                }
                for k in &ks {
                    let ok = match k {
                        Kink::Abs => xn.abs() >= an,
                        Kink::Sqrt => xn >= an,
                    };
                    if !ok {
                        return Err(coordinate_fail(
                            f,
                            x,
                            n,
                            grade,
                            format!(
                                "the interval of radius {an} around x*_{n} = {xn} contains a kink"
                            ),
                        ));
                    }
                }
            }
            Ok(grade)
        }
    }
}

/// Condition (iii) for an infinite separable family: a summable majorant
/// `M_k >= sup |f_k'(x; e_n)|` over the admissible intervals, so the
/// derivative series converge uniformly by the Weierstrass test.
fn uniform_majorant(
    weight: &Coef,
    inner: &ScalarConvex,
    f: &FunctionExpr,
    x: &Point,
    radii: Option<&Point>,
) -> Result<Envelope> {
    let xenv = x.tail().envelope();
    let m = match (inner, radii) {
        // x_n - a_n >= x_n / 2, and 1/sqrt(x_n / 2) = sqrt(2) / sqrt(x_n)
        (ScalarConvex::NegSqrt { .. }, None) => {
            derivative_envelope(f, x).map(|e| e.scale(2f64.sqrt()))
        }
        (ScalarConvex::NegSqrt { .. }, Some(_)) => None,
        (_, radii) => {
            let renv = match radii {
                Some(a) => a.tail().envelope(),
                None if inner.has_kinks() => xenv.scale(0.5),
                None => Envelope::constant(1.0),
            };
            inner
                .derivative_envelope(&xenv.add(&renv))
                .map(|d| weight.envelope().mul(&d))
        }
    };
    match m {
        Some(m) if m.is_summable() => Ok(m),
        _ => Err(Error::NoMajorant),
    }
}

/// Checks the hypotheses of term-wise differentiation and returns
/// `f'(x*; e_n) = sum_k f_k'(x*; e_n)`.
pub fn series_differentiate(
    family: &SeriesFamily,
    x: &Point,
    radii: Option<&Point>,
    opts: &CertifyOpts,
) -> Result<SeriesDiff> {
    let f = family.sum()?;
    check_domain(&f, x)?;
    let mut evidence = Evidence::default();

    let grade = match interval_existence(&f, x, radii, opts) {
        Ok(g) => g,
        Err(cert) => {
            return Ok(SeriesDiff {
                certificate: cert,
                derivatives: Vec::new(),
            })
        }
    };

    // (iii)
    if let SeriesFamily::Separable { weight, inner } = family {
        let m = uniform_majorant(weight, inner, &f, x, radii)?;
        evidence.notes.push(format!(
            "summable derivative majorant with {} terms",
            m.terms().len()
        ));
    } else {
        evidence
            .notes
            .push("finitely many terms; uniform convergence is immediate".into());
    }

    // (ii) the series of values converges at x*
    let value = evaluate(&f, x, opts.series_tol)?;
    evidence.values.insert("f(x*)".into(), value.value);
    evidence
        .values
        .insert("f(x*) error bound".into(), value.error_bound);

    let derivatives = (1..=opts.coords)
        .map(|n| match family {
            SeriesFamily::Terms { terms } => terms.iter().try_fold(0.0, |acc, t| {
                analytic_dir_deriv(t, x, n)?
                    .value()
                    .map(|v| acc + v)
                    .ok_or(Error::PartialNotDifferentiable(n))
            }),
            SeriesFamily::Separable { .. } => analytic_dir_deriv(&f, x, n)?
                .value()
                .ok_or(Error::PartialNotDifferentiable(n)),
        })
        .collect::<Result<Vec<f64>>>()?;
    if let Some(d) = derivative_form(&f, x) {
        evidence.forms.insert(
            "f'(x*; e_n)".into(),
            format!("{} for n > {}", d.form, d.valid_after),
        );
    }
    let certificate = Certificate::holds(CHECK, grade)
        .with_reason("interval existence, pointwise and uniform convergence hold")
        .with_evidence(evidence);
    Ok(SeriesDiff {
        certificate,
        derivatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::Verdict;
    use crate::funcs::{example3_minimizer, l1_norm};
    use crate::seqspace::TailRule;

    fn example3_family(weight: TailRule) -> SeriesFamily {
        SeriesFamily::Separable {
            weight: Coef::Rule(weight),
            inner: ScalarConvex::AffineQuad {
                a: 1.0,
                b: Coef::Rule(TailRule::Harmonic(-1.0)),
            },
        }
    }

    #[test]
    fn example3_family_differentiates_termwise() {
        let r = series_differentiate(
            &example3_family(TailRule::Geometric(1.0, 0.5)),
            &example3_minimizer(),
            None,
            &CertifyOpts::default(),
        )
        .unwrap();
        assert_eq!(
            (r.certificate.verdict, r.certificate.grade),
            (Verdict::Holds, Grade::AnalyticAllN)
        );
        assert!(
            r.derivatives.iter().all(|d| d.abs() < 1e-15),
            "{:?}",
            r.derivatives
        );
    }

    #[test]
    fn single_term_matches_analytic_derivative() {
        let f = l1_norm();
        let x = Point::from_rule(vec![2.0, -1.0], TailRule::Geometric(1.0, 0.5));
        let r = series_differentiate(
            &SeriesFamily::Terms {
                terms: vec![f.clone()],
            },
            &x,
            None,
            &CertifyOpts::default(),
        )
        .unwrap();
        for (i, d) in r.derivatives.iter().enumerate() {
            assert_eq!(Some(*d), analytic_dir_deriv(&f, &x, i + 1).unwrap().value());
        }
    }

    #[test]
    fn constant_weight_has_no_majorant() {
        let r = series_differentiate(
            &example3_family(TailRule::Const(1.0)),
            &example3_minimizer(),
            None,
            &CertifyOpts::default(),
        );
        assert_eq!(r, Err(Error::NoMajorant));
    }

    #[test]
    fn kink_on_the_interval_fails() {
        let x = Point::from_rule(vec![1.0, 0.0], TailRule::Geometric(1.0, 0.5));
        let r = series_differentiate(
            &SeriesFamily::Separable {
                weight: Coef::Rule(TailRule::Geometric(1.0, 0.5)),
                inner: ScalarConvex::Abs,
            },
            &x,
            None,
            &CertifyOpts::default(),
        )
        .unwrap();
        assert_eq!(r.certificate.verdict, Verdict::Fails);
        assert!(matches!(
            r.certificate.witness,
            Some(Witness::Coordinate { n: 2, .. })
        ));
    }
}
