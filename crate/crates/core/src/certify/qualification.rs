use super::certificate::{Certificate, Grade, Witness};
use super::set::SetDescriptor;
use crate::error::Error;
use crate::seqspace::{Point, SpaceDescriptor};

const CHECK: &str = "qualification";

fn interior_witness(set: &SetDescriptor, x: &Point, k: usize) -> Witness {
    let (lower, upper) = set.coordinate_bounds(k);
    Witness::Interior {
        k,
        coordinate: x.coordinate(k),
        lower,
        upper,
    }
}

/// Whether `P^k(x*)` is interior to every truncated set `X^k` and `X` is
/// stable under anchored projections.
pub fn check_qualification(
    set: &SetDescriptor,
    space: &SpaceDescriptor,
    x: &Point,
    n_max: usize,
) -> Certificate {
    match set.violation(space, x) {
        Ok(Some(n)) => {
            return Certificate::fails(CHECK, Grade::AnalyticAllN, Witness::NotInSet { n })
                .with_reason(format!("x* is not in the {} set", set.name()))
        }
        Ok(None) => {}
        Err(e) => return Certificate::inconclusive(CHECK, Grade::NumericFirstN(0), e.to_string()),
    }
    debug_assert!(set.stable_under_projection());
    match set.first_boundary_coordinate(x) {
        Ok(None) => Certificate::holds(CHECK, Grade::AnalyticAllN).with_reason(match set {
            SetDescriptor::WholeSpace => "every truncation of the whole space is open",
            _ => "every coordinate of x* is strictly inside its bounds",
        }),
        Ok(Some(k)) => Certificate::fails(CHECK, Grade::AnalyticAllN, interior_witness(set, x, k))
            .with_reason(format!("coordinate {k} of x* lies on the boundary")),
        Err(Error::UndecidableSign { .. }) => {
            for k in 1..=n_max {
                let (lo, hi) = set.coordinate_bounds(k);
                let v = x.coordinate(k);
                if !(lo < v && v < hi) {
                    return Certificate::fails(
                        CHECK,
                        Grade::AnalyticAllN,
                        interior_witness(set, x, k),
                    )
                    .with_reason(format!("coordinate {k} of x* lies on the boundary"));
                }
            }
            Certificate::holds(CHECK, Grade::NumericFirstN(n_max))
                .with_reason("sign of the tail undecided; interior checked coordinate-wise")
        }
        Err(e) => Certificate::inconclusive(CHECK, Grade::NumericFirstN(0), e.to_string()),
    }
}
