//! Seeded random points from the tail grammar.

use rand::Rng;

use crate::certify::SetDescriptor;
use crate::seqspace::{Point, SpaceDescriptor, SpaceKind, Tail, TailRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    /// Bounded sequences: constant, harmonic and geometric tails.
    Bounded,
    /// Summable sequences: geometric tails only.
    Ell1,
    /// Summable with every coordinate `>= 0`.
    NonnegEll1,
    /// Summable with every coordinate nonzero.
    NonzeroEll1,
}

fn signed<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let v = rng.gen_range(lo..=hi);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

fn ratio<R: Rng>(rng: &mut R, positive: bool) -> f64 {
    let r = rng.gen_range(0.1..=0.9);
    if positive || rng.gen_bool(0.5) {
        r
    } else {
        -r
    }
}

pub fn sample_point<R: Rng>(rng: &mut R, class: PointClass) -> Point {
    let m = rng.gen_range(0..=4);
    let (prefix, rules): (Vec<f64>, Vec<TailRule>) = match class {
        PointClass::Bounded => {
            let prefix = (0..m).map(|_| rng.gen_range(-2.0..=2.0)).collect();
            let rules = vec![
                TailRule::Const(rng.gen_range(-1.0..=1.0)),
                TailRule::Harmonic(rng.gen_range(-1.0..=1.0)),
                TailRule::Geometric(rng.gen_range(-1.0..=1.0), ratio(rng, false)),
            ];
            (prefix, rules)
        }
        PointClass::Ell1 => {
            let prefix = (0..m).map(|_| rng.gen_range(-2.0..=2.0)).collect();
            let count = rng.gen_range(0..=2);
            let rules = (0..count)
                .map(|_| TailRule::Geometric(rng.gen_range(-1.0..=1.0), ratio(rng, false)))
                .collect();
            (prefix, rules)
        }
        PointClass::NonnegEll1 => {
            let prefix = (0..m).map(|_| rng.gen_range(0.0..=2.0)).collect();
            let count = rng.gen_range(0..=2);
            let rules = (0..count)
                .map(|_| TailRule::Geometric(rng.gen_range(0.0..=1.0), ratio(rng, true)))
                .collect();
            (prefix, rules)
        }
        PointClass::NonzeroEll1 => {
            let prefix = (0..m).map(|_| signed(rng, 0.1, 2.0)).collect();
            let rules = vec![TailRule::Geometric(
                signed(rng, 0.1, 1.0),
                ratio(rng, false),
            )];
            (prefix, rules)
        }
    };
    Point::new(prefix, Tail::from_rules(rules)).expect("finite samples")
}

/// A direction with a random finite part and a tail proportional to the
/// tail of `x`, so `x + t h` keeps the sign pattern of `x` far out.
pub fn direction_like<R: Rng>(rng: &mut R, x: &Point) -> Point {
    let m = rng.gen_range(1..=4).max(x.prefix_len());
    let prefix = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let s = rng.gen_range(-1.0..=1.0);
    Point::new(prefix, x.tail().scale(s)).expect("finite samples")
}

/// A random point of `set` within `space`.
pub fn sample_in_set<R: Rng>(rng: &mut R, set: &SetDescriptor, space: &SpaceDescriptor) -> Point {
    match set {
        SetDescriptor::WholeSpace => match space.kind {
            SpaceKind::Ell1 => sample_point(rng, PointClass::Ell1),
            SpaceKind::EllInf | SpaceKind::Rn => sample_point(rng, PointClass::Bounded),
        },
        SetDescriptor::PositiveConeEll1 => sample_point(rng, PointClass::NonnegEll1),
        SetDescriptor::Box { lower, upper } => {
            let theta = rng.gen_range(0.0..=1.0);
            let m = lower.prefix_len().max(upper.prefix_len()) + 3;
            let prefix = (1..=m)
                .map(|n| {
                    let (l, u) = (lower.coordinate(n), upper.coordinate(n));
                    l + rng.gen_range(0.0..=1.0) * (u - l)
                })
                .collect();
            let tail = lower.tail().axpy(theta, &upper.tail().sub(lower.tail()));
            Point::new(prefix, tail).expect("finite samples")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn classes_respect_their_spaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            assert!(sample_point(&mut rng, PointClass::Ell1).in_ell1());
            assert!(sample_point(&mut rng, PointClass::Bounded).in_ellinf());
            let p = sample_point(&mut rng, PointClass::NonnegEll1);
            assert_eq!(p.first_negative().unwrap(), None);
            let q = sample_point(&mut rng, PointClass::NonzeroEll1);
            assert_eq!(q.first_zero().unwrap(), None);
        }
    }

    #[test]
    fn box_samples_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let space = SpaceDescriptor::ellinf();
        let set = SetDescriptor::new_box(
            Point::from_rule(vec![-1.0], TailRule::Const(-0.5)),
            Point::from_rule(vec![2.0], TailRule::Harmonic(1.0)),
        )
        .unwrap();
        for _ in 0..50 {
            let x = sample_in_set(&mut rng, &set, &space);
            assert!(set.contains(&space, &x).unwrap(), "{x}");
        }
    }

    #[test]
    fn directions_follow_the_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Point::from_rule(vec![], TailRule::Geometric(1.0, 0.5));
        let h = direction_like(&mut rng, &x);
        let ratio = h.coordinate(30) / x.coordinate(30);
        assert!((h.coordinate(31) / x.coordinate(31) - ratio).abs() < 1e-9);
    }
}
