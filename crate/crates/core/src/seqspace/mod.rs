//! Sequences with exact prefixes and closed-form tails, the coordinate
//! projections, pairings and certified series.

mod point;
mod series;
mod sign;
mod space;
mod tail;

pub use point::{DualPoint, Point};
pub use series::{
    certified_series, certified_sum, l1_norm, metric_rn, pair, series_with_terms, sum_prefix,
    EnvTerm, Envelope, FnTerms, SeriesSum, SeriesValue, TermRule, DEFAULT_SERIES_TOL, MAX_TERMS,
};
pub use sign::{eventual_sign, EventualSign, SignPattern};
pub use space::{SpaceDescriptor, SpaceKind};
pub use tail::{Tail, TailRule, TailScan};

/// `anchor + P^k(x - anchor)`.
pub fn project(x: &Point, k: usize, anchor: &Point) -> Point {
    x.project(k, anchor)
}

pub fn basis_vector(n: usize) -> Point {
    Point::basis(n)
}

pub fn coordinate(x: &Point, n: usize) -> f64 {
    x.coordinate(n)
}
