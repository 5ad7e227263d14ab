//! Gateaux differentiability from the coordinate derivatives, and the
//! assembled derivative `h -> sum_n f'(x*; e_n) h_n`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::certificate::{Certificate, CoordinateRecord, Evidence, Grade, Witness};
use super::CertifyOpts;
use crate::derivative::{dir_deriv, dir_deriv_profile, DerivOpts};
use crate::error::{Error, Result};
use crate::funcs::{
    analytic_dir_deriv, check_domain, derivative_envelope, derivative_form, is_continuous,
    one_sided, tail_existence, Existence, FunctionExpr,
};
use crate::sample::direction_like;
use crate::seqspace::{
    certified_series, Envelope, FnTerms, Point, SeriesValue, SpaceDescriptor, TailRule,
};

const CHECK: &str = "gateaux";

/// `df(x*)`, represented by its coefficients `f'(x*; e_n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateauxDerivative {
    /// `f'(x*; e_n)` for `n = 1..=N`.
    pub coefficients: Vec<f64>,
    /// Closed form of the coefficients beyond the explicit prefixes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<String>,
    #[serde(skip)]
    f: FunctionExpr,
    #[serde(skip)]
    x: Point,
    #[serde(skip)]
    envelope: Option<Envelope>,
}

impl GateauxDerivative {
    fn new(f: &FunctionExpr, x: &Point, count: usize) -> Result<Self> {
        let coefficients = (1..=count)
            .map(|n| Ok(analytic_dir_deriv(f, x, n)?.value().unwrap_or(f64::NAN)))
            .collect::<Result<_>>()?;
        Ok(GateauxDerivative {
            coefficients,
            form: derivative_form(f, x).map(|d| format!("{} for n > {}", d.form, d.valid_after)),
            f: f.clone(),
            x: x.clone(),
            envelope: derivative_envelope(f, x),
        })
    }

    /// `f'(x*; e_n)`.
    pub fn coefficient(&self, n: usize) -> Result<f64> {
        analytic_dir_deriv(&self.f, &self.x, n)?
            .value()
            .ok_or(Error::PartialNotDifferentiable(n))
    }

    /// `df(x*)(h) = sum_n f'(x*; e_n) h_n`, certified from the tails.
    pub fn apply(&self, h: &Point, tol: f64) -> Result<SeriesValue> {
        let env = self
            .envelope
            .as_ref()
            .ok_or(Error::NoMajorant)?
            .mul(&h.tail().envelope());
        if !env.is_summable() {
            return Err(Error::NonConvergentPairing);
        }
        let rule = FnTerms {
            term: |n| Ok(self.coefficient(n)? * h.coordinate(n)),
            start: self
                .x
                .prefix_len()
                .max(self.f.prefix_len())
                .max(h.prefix_len()),
            envelope: Some(env),
        };
        certified_series(&rule, tol)
    }
}

/// Directions used to cross-check the assembled derivative: `e_1`, a finite
/// one, and seeded directions with tails proportional to that of `x*`.
fn validation_directions(x: &Point, opts: &CertifyOpts) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let tail = if x.tail().is_zero() {
        Point::from_rule(Vec::new(), TailRule::Geometric(1.0, 0.5))
    } else {
        Point::new(Vec::new(), x.tail().clone()).expect("finite")
    };
    let mut hs = vec![
        Point::basis(1),
        Point::from_rule(vec![1.0, -0.5, 0.25], TailRule::Zero),
        tail.scale(0.5),
    ];
    hs.extend((0..2).map(|_| direction_like(&mut rng, &tail)));
    hs
}

/// Gateaux differentiability of `f` at `x*`, with `witness_directions`
/// tried as non-basis refutations.
pub fn gateaux_detect(
    f: &FunctionExpr,
    space: &SpaceDescriptor,
    x: &Point,
    witness_directions: &[Point],
    opts: &CertifyOpts,
) -> (Certificate, Option<GateauxDerivative>) {
    if let Err(e) = check_domain(f, x) {
        return (
            Certificate::inconclusive(CHECK, Grade::NumericFirstN(0), e.to_string()),
            None,
        );
    }
    let mut evidence = Evidence::default();
    let existence = match tail_existence(f, x) {
        Ok(e) => e,
        Err(e) => {
            return (
                Certificate::inconclusive(CHECK, Grade::NumericFirstN(0), e.to_string()),
                None,
            )
        }
    };
    if let Existence::FailsAt(n) = existence {
        let (left, right) = one_sided(f, x, n);
        let witness = Witness::Coordinate {
            n,
            left,
            right,
            expected: f64::NAN,
        };
        let cert = Certificate::fails(CHECK, Grade::AnalyticAllN, witness)
            .with_reason(format!("f'(x*; e_{n}) does not exist"));
        return (cert, None);
    }

    let numeric = DerivOpts {
        prefer_analytic: false,
        ..opts.deriv
    };
    for h in witness_directions {
        match dir_deriv(f, x, h, &numeric) {
            Ok(r) if !r.exists => {
                let witness = Witness::Direction {
                    h: h.clone(),
                    left: r.left,
                    right: r.right,
                };
                let cert = Certificate::fails(CHECK, Grade::AnalyticAllN, witness)
                    .with_reason("one-sided derivatives differ along a supplied direction");
                return (cert, None);
            }
            Ok(_) => evidence
                .notes
                .push(format!("derivative exists along supplied direction {h}")),
            Err(e) => evidence.notes.push(format!("supplied direction {h}: {e}")),
        }
    }

    if !space.basis_is_topological {
        let cert = Certificate::inconclusive(
            CHECK,
            Grade::AnalyticAllN,
            format!("the coordinate basis of {space} is not topological; coordinate derivatives do not decide Gateaux differentiability"),
        )
        .with_evidence(evidence);
        return (cert, None);
    }
    if !is_continuous(f, space) {
        let cert = Certificate::inconclusive(
            CHECK,
            Grade::AnalyticAllN,
            format!("f is not certified continuous on {space}"),
        )
        .with_evidence(evidence);
        return (cert, None);
    }

    let grade = match existence {
        Existence::AllExist => Grade::AnalyticAllN,
        _ => {
            let profile = match dir_deriv_profile(f, x, opts.coords, &opts.deriv) {
                Ok(p) => p,
                Err(e) => {
                    let cert = Certificate::inconclusive(
                        CHECK,
                        Grade::NumericFirstN(opts.coords),
                        e.to_string(),
                    );
                    return (cert.with_evidence(evidence), None);
                }
            };
            evidence.coordinates = profile
                .iter()
                .enumerate()
                .map(|(i, r)| CoordinateRecord::from_result(i + 1, r))
                .collect();
            if let Some(i) = profile.iter().position(|r| !r.exists) {
                let witness = Witness::Coordinate {
                    n: i + 1,
                    left: profile[i].left,
                    right: profile[i].right,
                    expected: f64::NAN,
                };
                let cert = Certificate::fails(CHECK, Grade::NumericFirstN(opts.coords), witness);
                return (cert.with_evidence(evidence), None);
            }
            Grade::NumericFirstN(opts.coords)
        }
    };

    let df = match GateauxDerivative::new(f, x, opts.coords) {
        Ok(d) => d,
        Err(e) => {
            return (
                Certificate::inconclusive(CHECK, grade, e.to_string()).with_evidence(evidence),
                None,
            )
        }
    };
    for (i, h) in validation_directions(x, opts).iter().enumerate() {
        let assembled = match df.apply(h, opts.series_tol) {
            Ok(v) => v.value,
            Err(e) => {
                evidence
                    .notes
                    .push(format!("validation direction {i}: {e}"));
                continue;
            }
        };
        match dir_deriv(f, x, h, &numeric) {
            Ok(r) => {
                let direct = 0.5 * (r.left + r.right);
                evidence.values.insert(format!("df(x*)(h_{i})"), assembled);
                evidence.values.insert(format!("f'(x*; h_{i})"), direct);
                if !r.exists || (direct - assembled).abs() > 1e-6 {
                    let cert = Certificate::inconclusive(
                        CHECK,
                        grade,
                        format!("assembled derivative {assembled} disagrees with difference quotients {direct} along h_{i}"),
                    );
                    return (cert.with_evidence(evidence), Some(df));
                }
            }
            Err(e) => evidence
                .notes
                .push(format!("validation direction {i}: {e}")),
        }
    }
    let cert = Certificate::holds(CHECK, grade)
        .with_reason("f is continuous, the basis is topological and every f'(x*; e_n) exists")
        .with_evidence(evidence);
    (cert, Some(df))
}
