//! Built-in scenarios reproducing the worked examples.

use super::scenario::{Expected, Scenario, Task};
use crate::certify::{SeriesFamily, SetDescriptor};
use crate::error::Result;
use crate::funcs::{
    example3_minimizer, example3_objective, example4_minimizer, example4_objective,
    example5_objective, l1_norm, Coef, FunctionExpr, ScalarConvex,
};
use crate::seqspace::{Point, SpaceDescriptor, TailRule};

pub const DEFAULT_BETA: f64 = 0.5;

/// Names and one-line descriptions, in alphabetical order.
pub const BUILTINS: [(&str, &str); 5] = [
    ("example1", "limsup seminorm on ℓ∞"),
    (
        "example3",
        "limsup plus weighted quadratic on ℓ∞, minimizer (1/(2n))",
    ),
    ("example4", "weighted sqrt objective on positive cone"),
    ("example5", "stationary point that is not a minimizer on ℓ∞"),
    (
        "l1norm",
        "ℓ¹ norm: Gateaux differentiability iff no zero coordinate",
    ),
];

fn expect(mut s: Scenario, e: Expected) -> Scenario {
    s.expected = Some(e);
    s
}

fn with_beta(mut s: Scenario, beta: f64) -> Scenario {
    s.beta = Some(beta);
    s
}

fn example1() -> Vec<Scenario> {
    let space = SpaceDescriptor::ellinf();
    let f = || Some(FunctionExpr::Limsup);
    let mut witness = Scenario::new(
        "example1/gateaux-witness",
        space,
        Task::Gateaux,
        f(),
        Point::zero(),
    );
    witness.directions = vec![Point::constant(1.0)];
    vec![
        expect(
            Scenario::new(
                "example1/dir-profile",
                space,
                Task::DirProfile,
                f(),
                Point::zero(),
            ),
            Expected::Holds,
        ),
        expect(
            Scenario::new(
                "example1/gateaux-basis",
                space,
                Task::Gateaux,
                f(),
                Point::zero(),
            ),
            Expected::Inconclusive,
        ),
        expect(witness, Expected::Fails),
        expect(
            Scenario::new(
                "example1/psc-null-sequence",
                space,
                Task::Psc,
                f(),
                example3_minimizer(),
            ),
            Expected::Holds,
        ),
        expect(
            Scenario::new(
                "example1/psc-ones",
                space,
                Task::Psc,
                f(),
                Point::constant(1.0),
            ),
            Expected::Fails,
        ),
    ]
}

fn example3(beta: f64) -> Result<Vec<Scenario>> {
    let space = SpaceDescriptor::ellinf();
    let f = example3_objective(beta)?;
    let mut series = Scenario::new(
        "example3/series-diff",
        space,
        Task::SeriesDiff,
        None,
        example3_minimizer(),
    );
    series.family = Some(SeriesFamily::Separable {
        weight: Coef::Rule(TailRule::geometric(1.0, beta)?),
        inner: ScalarConvex::AffineQuad {
            a: 1.0,
            b: Coef::Rule(TailRule::Harmonic(-1.0)),
        },
    });
    Ok(vec![
        expect(
            Scenario::new(
                "example3/certify-min",
                space,
                Task::CertifyMin,
                Some(f),
                example3_minimizer(),
            ),
            Expected::Holds,
        ),
        expect(series, Expected::Holds),
    ]
    .into_iter()
    .map(|s| with_beta(s, beta))
    .collect())
}

fn example4(beta: f64) -> Result<Vec<Scenario>> {
    let space = SpaceDescriptor::ell1();
    let x = example4_minimizer(beta)?;
    let mut min = Scenario::new(
        "example4/certify-min",
        space,
        Task::CertifyMin,
        Some(example4_objective(beta)?),
        x.clone(),
    );
    min.set = SetDescriptor::PositiveConeEll1;
    let mut qual = Scenario::new(
        "example4/qualification",
        space,
        Task::Qualification,
        None,
        x,
    );
    qual.set = SetDescriptor::PositiveConeEll1;
    Ok(
        vec![expect(min, Expected::Holds), expect(qual, Expected::Holds)]
            .into_iter()
            .map(|s| with_beta(s, beta))
            .collect(),
    )
}

fn example5(beta: f64) -> Result<Vec<Scenario>> {
    let space = SpaceDescriptor::ellinf();
    let f = example5_objective(beta)?;
    let mut min = Scenario::new(
        "example5/certify-min",
        space,
        Task::CertifyMin,
        Some(f.clone()),
        Point::constant(1.0),
    );
    min.probes = vec![Point::constant(0.5)];
    let psc = Scenario::new(
        "example5/psc",
        space,
        Task::Psc,
        Some(f),
        Point::constant(1.0),
    );
    Ok(
        vec![expect(min, Expected::Fails), expect(psc, Expected::Fails)]
            .into_iter()
            .map(|s| with_beta(s, beta))
            .collect(),
    )
}

fn l1norm() -> Vec<Scenario> {
    let space = SpaceDescriptor::ell1();
    let f = || Some(l1_norm());
    vec![
        expect(
            Scenario::new(
                "l1norm/gateaux-at-e1",
                space,
                Task::Gateaux,
                f(),
                Point::basis(1),
            ),
            Expected::Fails,
        ),
        expect(
            Scenario::new(
                "l1norm/gateaux-nonzero",
                space,
                Task::Gateaux,
                f(),
                Point::from_rule(Vec::new(), TailRule::Geometric(1.0, 0.5)),
            ),
            Expected::Holds,
        ),
    ]
}

/// Scenarios of a builtin, or `None` for an unknown name.
pub fn builtin(name: &str, beta: f64) -> Option<Result<Vec<Scenario>>> {
    Some(match name {
        "example1" => Ok(example1()),
        "example3" => example3(beta),
        "example4" => example4(beta),
        "example5" => example5(beta),
        "l1norm" => Ok(l1norm()),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listing_is_sorted_and_complete() {
        let names: Vec<_> = BUILTINS.iter().map(|(n, _)| *n).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        for n in names {
            assert!(builtin(n, DEFAULT_BETA).unwrap().is_ok());
        }
        assert!(builtin("example2", DEFAULT_BETA).is_none());
    }

    #[test]
    fn builtins_validate() {
        for (n, _) in BUILTINS {
            for s in builtin(n, DEFAULT_BETA).unwrap().unwrap() {
                s.validate().unwrap();
            }
        }
    }
}
