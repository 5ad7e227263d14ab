//! Samplers and property bodies shared by the property and acceptance suites.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqcert::certify::{
    certify_min, check_psc, gateaux_detect, kkt_certify, subgradient_test, CertifyOpts,
    SetDescriptor, Verdict,
};
use seqcert::derivative::{dir_deriv, dir_deriv_profile, DerivOpts};
use seqcert::funcs::{
    analytic_dir_deriv, evaluate, example3_objective, example4_objective, l1_norm,
    lower_bound_constraint, weighted_square, Coef, FunctionExpr, ScalarConvex,
};
use seqcert::reduce::{build_reduced, grad_reduced, minimize_reduced, MinimizeOpts};
use seqcert::sample::{direction_like, sample_point, PointClass};
use seqcert::seqspace::{pair, DualPoint, Point, SpaceDescriptor, Tail, TailRule};

pub type PropResult = Result<(), TestCaseError>;

pub const TOL: f64 = 1e-7;
pub const SERIES_TOL: f64 = 1e-13;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn value(f: &FunctionExpr, x: &Point) -> f64 {
    evaluate(f, x, SERIES_TOL).unwrap().value
}

/// Every coordinate in `[0.1, 2]` up front and a positive geometric tail.
pub fn positive_point(r: &mut ChaCha8Rng) -> Point {
    let m = r.gen_range(0..=4);
    let prefix = (0..m).map(|_| r.gen_range(0.1..=2.0)).collect();
    Point::from_rule(
        prefix,
        TailRule::Geometric(r.gen_range(0.1..=1.0), r.gen_range(0.1..=0.9)),
    )
}

/// Smooth functions finite on all of l^1.
pub fn smooth_function(r: &mut ChaCha8Rng) -> FunctionExpr {
    let beta = r.gen_range(0.1..=0.6);
    match r.gen_range(0..3) {
        0 => weighted_square(beta).unwrap(),
        1 => example3_objective(beta).unwrap(),
        _ => FunctionExpr::separable(
            TailRule::Geometric(1.0, beta),
            ScalarConvex::AffineQuad {
                a: r.gen_range(0.0..=2.0),
                b: Coef::Num(r.gen_range(-1.0..=1.0)),
            },
        )
        .unwrap(),
    }
}

/// Convex grammar functions finite on l^1, kinks allowed.
pub fn convex_function(r: &mut ChaCha8Rng) -> FunctionExpr {
    match r.gen_range(0..3) {
        0 => l1_norm(),
        1 => FunctionExpr::Sum(vec![smooth_function(r), l1_norm()]),
        _ => smooth_function(r),
    }
}

/// `limsup`, weighted quadratics and nonnegative multiples of `limsup`.
pub fn ellinf_function(r: &mut ChaCha8Rng) -> FunctionExpr {
    let beta = r.gen_range(0.1..=0.6);
    match r.gen_range(0..4) {
        0 => FunctionExpr::Limsup,
        1 => weighted_square(beta).unwrap(),
        2 => example3_objective(beta).unwrap(),
        _ => FunctionExpr::Scale(r.gen_range(0.0..=2.0), Box::new(FunctionExpr::Limsup)),
    }
}

pub fn biorthogonality(n: usize, m: usize) -> PropResult {
    let e = Point::basis(m);
    let delta = if n == m { 1.0 } else { 0.0 };
    prop_assert_eq!(e.coordinate(n), delta);
    let star = DualPoint::coordinate_functional(n);
    prop_assert_eq!(pair(&star, &e, SERIES_TOL).unwrap().value, delta);
    Ok(())
}

pub fn projection_idempotent_and_nested(seed: u64, j: usize, k: usize) -> PropResult {
    let mut r = rng(seed);
    let x = sample_point(&mut r, PointClass::Bounded);
    let a = sample_point(&mut r, PointClass::Bounded);
    let pk = x.project(k, &a);
    prop_assert!(pk.project(k, &a).seq_eq(&pk));
    prop_assert!(pk.project(j, &a).seq_eq(&x.project(j.min(k), &a)));
    Ok(())
}

pub fn projection_contracts_l1(seed: u64, k: usize) -> PropResult {
    let x = sample_point(&mut rng(seed), PointClass::Ell1);
    let full = seqcert::seqspace::l1_norm(&x, SERIES_TOL).unwrap().value;
    let cut = seqcert::seqspace::l1_norm(&x.project(k, &Point::zero()), SERIES_TOL)
        .unwrap()
        .value;
    prop_assert!(cut <= full + 1e-12);
    Ok(())
}

pub fn convexity_sampling(seed: u64, theta: f64) -> PropResult {
    let mut r = rng(seed);
    let f = convex_function(&mut r);
    let x = sample_point(&mut r, PointClass::Ell1);
    let y = sample_point(&mut r, PointClass::Ell1);
    let mid = x.scale(theta).add(&y.scale(1.0 - theta));
    prop_assert!(value(&f, &mid) <= theta * value(&f, &x) + (1.0 - theta) * value(&f, &y) + 1e-9);
    Ok(())
}

/// Right quotients decrease and left quotients increase as `t -> 0`, and the
/// left derivative never exceeds the right one.
pub fn quotients_monotone_and_sides_ordered(seed: u64) -> PropResult {
    let mut r = rng(seed);
    let f = convex_function(&mut r);
    let x = sample_point(&mut r, PointClass::Ell1);
    let h = direction_like(&mut r, &x);
    let d = dir_deriv(&f, &x, &h, &DerivOpts::numeric()).unwrap();
    let slack = 2.0 * d.noise_floor + 1e-12;
    let right: Vec<_> = d.quotients_log.iter().filter(|q| q.0 > 0.0).collect();
    let left: Vec<_> = d.quotients_log.iter().filter(|q| q.0 < 0.0).collect();
    for w in right.windows(2) {
        prop_assert!(w[1].1 <= w[0].1 + slack, "{:?}", right);
    }
    for w in left.windows(2) {
        prop_assert!(w[1].1 >= w[0].1 - slack, "{:?}", left);
    }
    prop_assert!(d.left <= d.right + slack);
    Ok(())
}

pub fn positive_homogeneity(seed: u64, lambda: f64) -> PropResult {
    let mut r = rng(seed);
    let f = convex_function(&mut r);
    let x = sample_point(&mut r, PointClass::Ell1);
    let h = direction_like(&mut r, &x);
    let opts = DerivOpts::numeric();
    let d1 = dir_deriv(&f, &x, &h, &opts).unwrap();
    let d2 = dir_deriv(&f, &x, &h.scale(lambda), &opts).unwrap();
    prop_assert!((d2.right - lambda * d1.right).abs() <= 1e-6 * (1.0 + d1.right.abs() * lambda));
    prop_assert!((d2.left - lambda * d1.left).abs() <= 1e-6 * (1.0 + d1.left.abs() * lambda));
    Ok(())
}

/// Closed-form and difference-quotient derivatives along `e_n` agree.
pub fn analytic_matches_numeric(seed: u64, n: usize) -> PropResult {
    let mut r = rng(seed);
    let (f, x) = match r.gen_range(0..3) {
        0 => (
            smooth_function(&mut r),
            sample_point(&mut r, PointClass::Ell1),
        ),
        1 => (l1_norm(), sample_point(&mut r, PointClass::NonzeroEll1)),
        _ => (
            example4_objective(r.gen_range(0.1..=0.6)).unwrap(),
            positive_point(&mut r),
        ),
    };
    let analytic = analytic_dir_deriv(&f, &x, n).unwrap().value().unwrap();
    let numeric = dir_deriv(&f, &x, &Point::basis(n), &DerivOpts::numeric()).unwrap();
    prop_assert!(numeric.exists);
    let v = numeric.value.unwrap();
    prop_assert!(
        (v - analytic).abs() <= 1e-8,
        "n = {n}: analytic {analytic}, numeric {v}"
    );
    Ok(())
}

pub fn psc_sum_rule(seed: u64) -> PropResult {
    let mut r = rng(seed);
    let f = ellinf_function(&mut r);
    let g = ellinf_function(&mut r);
    let x = sample_point(&mut r, PointClass::Bounded);
    let probes: Vec<Point> = (0..3)
        .map(|_| sample_point(&mut r, PointClass::Bounded))
        .collect();
    let space = SpaceDescriptor::ellinf();
    let opts = CertifyOpts::default();
    let set = SetDescriptor::WholeSpace;
    let pf = check_psc(&f, &set, &space, &x, &probes, &opts);
    let pg = check_psc(&g, &set, &space, &x, &probes, &opts);
    let sum = check_psc(
        &FunctionExpr::Sum(vec![f, g]),
        &set,
        &space,
        &x,
        &probes,
        &opts,
    );
    if pf.passed() && pg.passed() {
        prop_assert!(sum.passed(), "{sum}");
    }
    Ok(())
}

/// `p_n = 2 beta^n x_n` is the gradient of `sum beta^n x_n^2`; a HOLDS
/// verdict must come with `f(y) >= f(x) + <p, y - x>` at 50 random points.
pub fn subgradient_inequality(seed: u64, beta: f64) -> PropResult {
    let mut r = rng(seed);
    let x = sample_point(&mut r, PointClass::Ell1);
    let f = weighted_square(beta).unwrap();
    let prefix = (1..=x.prefix_len())
        .map(|n| 2.0 * beta.powi(n as i32) * x.coordinate(n))
        .collect();
    let tail = Tail::from_rules(
        x.tail()
            .geometric()
            .iter()
            .map(|&(q, c)| TailRule::Geometric(2.0 * c, beta * q)),
    );
    let p = DualPoint::new(Point::new(prefix, tail).unwrap());
    let c = subgradient_test(
        &f,
        &SpaceDescriptor::ell1(),
        &x,
        &p,
        &[],
        &CertifyOpts::default(),
    );
    prop_assert_eq!(c.verdict, Verdict::Holds, "{}", c);
    let fx = value(&f, &x);
    for _ in 0..50 {
        let y = sample_point(&mut r, PointClass::Ell1);
        let lin = pair(&p, &y.sub(&x), SERIES_TOL).unwrap().value;
        prop_assert!(value(&f, &y) >= fx + lin - TOL);
    }
    Ok(())
}

pub fn gateaux_linearity_and_assembly(seed: u64, alpha: f64) -> PropResult {
    let mut r = rng(seed);
    let x = sample_point(&mut r, PointClass::NonzeroEll1);
    let f = if r.gen_bool(0.5) {
        l1_norm()
    } else {
        FunctionExpr::Sum(vec![l1_norm(), smooth_function(&mut r)])
    };
    let (c, df) = gateaux_detect(
        &f,
        &SpaceDescriptor::ell1(),
        &x,
        &[],
        &CertifyOpts::default(),
    );
    prop_assert_eq!(c.verdict, Verdict::Holds, "{}", c);
    let df = df.unwrap();
    let h1 = direction_like(&mut r, &x);
    let h2 = direction_like(&mut r, &x);
    let lhs = df
        .apply(&h1.scale(alpha).add(&h2), SERIES_TOL)
        .unwrap()
        .value;
    let rhs =
        alpha * df.apply(&h1, SERIES_TOL).unwrap().value + df.apply(&h2, SERIES_TOL).unwrap().value;
    prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    let direct = dir_deriv(&f, &x, &h1, &DerivOpts::numeric()).unwrap();
    let assembled = df.apply(&h1, SERIES_TOL).unwrap().value;
    prop_assert!((direct.value.unwrap() - assembled).abs() <= 1e-6);
    Ok(())
}

pub fn reduced_gradient_matches_profile(seed: u64, k: usize) -> PropResult {
    let mut r = rng(seed);
    let f = smooth_function(&mut r);
    let x = sample_point(&mut r, PointClass::Ell1);
    let rp = build_reduced(
        &f,
        &SetDescriptor::WholeSpace,
        &SpaceDescriptor::ell1(),
        &x,
        k,
    )
    .unwrap();
    let grad = grad_reduced(&rp, &rp.anchor_head(), &DerivOpts::numeric()).unwrap();
    let profile = dir_deriv_profile(&f, &x, k, &DerivOpts::default()).unwrap();
    for (g, p) in grad.iter().zip(&profile) {
        prop_assert!((g - p.value.unwrap()).abs() <= 1e-7);
    }
    Ok(())
}

/// Minimum values can only drop as more coordinates are freed.
pub fn reduced_minima_refine_monotonically(seed: u64) -> PropResult {
    let mut r = rng(seed);
    let f = FunctionExpr::Sum(vec![smooth_function(&mut r), weighted_square(0.5).unwrap()]);
    let x = sample_point(&mut r, PointClass::Ell1);
    let space = SpaceDescriptor::ell1();
    let mut last = f64::INFINITY;
    for k in 1..=4 {
        let rp = build_reduced(&f, &SetDescriptor::WholeSpace, &space, &x, k).unwrap();
        let m = minimize_reduced(&rp, &MinimizeOpts::default()).unwrap();
        prop_assert!(m.value <= last + 1e-9, "k = {k}: {} after {last}", m.value);
        last = m.value;
    }
    Ok(())
}

/// For `sum beta^n (x_n^2 + b x_n)` the minimizer is the constant `-b/2`.
pub fn certified_minima_agree_with_oracle(beta: f64, b: f64) -> PropResult {
    let f = FunctionExpr::separable(
        TailRule::Geometric(1.0, beta),
        ScalarConvex::AffineQuad {
            a: 1.0,
            b: Coef::Num(b),
        },
    )
    .unwrap();
    let x = Point::constant(-b / 2.0);
    let space = SpaceDescriptor::ellinf();
    let set = SetDescriptor::WholeSpace;
    let c = certify_min(&f, &set, &space, &x, &[], &CertifyOpts::default());
    prop_assert_eq!(c.verdict, Verdict::Holds, "{}", c);
    let fx = value(&f, &x);
    for k in [1, 2, 4, 8] {
        let rp = build_reduced(&f, &set, &space, &x, k).unwrap();
        let m = minimize_reduced(&rp, &MinimizeOpts::default()).unwrap();
        prop_assert!((m.value - fx).abs() <= 1e-6, "k = {k}: {} vs {fx}", m.value);
    }
    Ok(())
}

/// `min sum beta^n x_n^2` subject to `x_j >= a` is attained at `a e_j` with
/// multiplier `2 beta^j a`; a HOLDS verdict must dominate 50 feasible points.
pub fn kkt_dominates_feasible_points(seed: u64, beta: f64, a: f64, j: usize) -> PropResult {
    let mut r = rng(seed);
    let f = weighted_square(beta).unwrap();
    let g = lower_bound_constraint(j, a).unwrap();
    let x = Point::basis(j).scale(a);
    let lambda = 2.0 * beta.powi(j as i32) * a;
    let c = kkt_certify(
        &f,
        std::slice::from_ref(&g),
        &[],
        &SetDescriptor::WholeSpace,
        &SpaceDescriptor::ell1(),
        &x,
        &[lambda],
        &[],
        &CertifyOpts::default(),
    )
    .unwrap();
    prop_assert_eq!(c.verdict, Verdict::Holds, "{}", c);
    let fx = value(&f, &x);
    for _ in 0..50 {
        let y = sample_point(&mut r, PointClass::Ell1);
        let mut head = y.head(j);
        head[j - 1] = a + r.gen_range(0.0..=1.0);
        let y = y.with_head(&head);
        prop_assert!(value(&g, &y) <= 0.0);
        prop_assert!(fx <= value(&f, &y) + TOL);
    }
    Ok(())
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> PropResult,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

/// Every property with its case count, for the acceptance run.
pub fn run_all() -> Vec<(&'static str, Result<(), String>)> {
    vec![
        (
            "biorthogonality",
            run(64, (1usize..50, 1usize..50), |(n, m)| biorthogonality(n, m)),
        ),
        (
            "projection idempotence and nesting",
            run(64, (any::<u64>(), 0usize..12, 0usize..12), |(s, j, k)| {
                projection_idempotent_and_nested(s, j, k)
            }),
        ),
        (
            "projection contracts l1",
            run(64, (any::<u64>(), 0usize..12), |(s, k)| {
                projection_contracts_l1(s, k)
            }),
        ),
        (
            "convexity sampling",
            run(64, (any::<u64>(), 0.0f64..=1.0), |(s, t)| {
                convexity_sampling(s, t)
            }),
        ),
        (
            "quotient monotonicity and left <= right",
            run(64, any::<u64>(), quotients_monotone_and_sides_ordered),
        ),
        (
            "positive homogeneity",
            run(64, (any::<u64>(), 0.1f64..4.0), |(s, l)| {
                positive_homogeneity(s, l)
            }),
        ),
        (
            "analytic vs numeric derivatives (100 triples, 1e-8)",
            run(100, (any::<u64>(), 1usize..=8), |(s, n)| {
                analytic_matches_numeric(s, n)
            }),
        ),
        ("psc sum rule", run(48, any::<u64>(), psc_sum_rule)),
        (
            "subgradient inequality sampling",
            run(48, (any::<u64>(), 0.1f64..=0.6), |(s, b)| {
                subgradient_inequality(s, b)
            }),
        ),
        (
            "gateaux linearity and assembly",
            run(48, (any::<u64>(), -2.0f64..2.0), |(s, a)| {
                gateaux_linearity_and_assembly(s, a)
            }),
        ),
        (
            "reduced gradient vs profile",
            run(48, (any::<u64>(), 1usize..=6), |(s, k)| {
                reduced_gradient_matches_profile(s, k)
            }),
        ),
        (
            "monotone refinement of reduced minima",
            run(48, any::<u64>(), reduced_minima_refine_monotonically),
        ),
        (
            "certified minima agree with oracle",
            run(12, (0.1f64..=0.6, -2.0f64..2.0), |(b, c)| {
                certified_minima_agree_with_oracle(b, c)
            }),
        ),
        (
            "kkt dominance over feasible points",
            run(
                12,
                (any::<u64>(), 0.1f64..=0.6, 0.1f64..2.0, 1usize..=4),
                |(s, b, a, j)| kkt_dominates_feasible_points(s, b, a, j),
            ),
        ),
    ]
}
