//! Certificate-producing checks: qualification of the feasible set,
//! pseudo-semicontinuity, optimality, subgradients, Gateaux differentiability,
//! term-wise differentiation of series and KKT conditions.

mod certificate;
mod gateaux;
mod kkt;
mod optimality;
mod psc;
mod qualification;
mod series_diff;
mod set;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::derivative::DerivOpts;
use crate::seqspace::{Point, SpaceDescriptor};

pub use certificate::{
    Certificate, CoordinateRecord, Evidence, Grade, ProbeRecord, Verdict, Witness,
};
pub use gateaux::{gateaux_detect, GateauxDerivative};
pub use kkt::kkt_certify;
pub use optimality::{certify_min, subgradient_test};
pub use psc::check_psc;
pub use qualification::check_qualification;
pub use series_diff::{series_differentiate, SeriesDiff, SeriesFamily};
pub use set::SetDescriptor;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertifyOpts {
    /// Tolerance for derivative and value comparisons.
    pub tol: f64,
    /// `N`: indices checked when a claim can only be sampled.
    pub coords: usize,
    /// `K`: truncation depth for sampled pseudo-semicontinuity.
    pub psc_depth: usize,
    pub seed: u64,
    pub random_probes: usize,
    pub series_tol: f64,
    pub deriv: DerivOpts,
}

impl Default for CertifyOpts {
    fn default() -> Self {
        CertifyOpts {
            tol: 1e-7,
            coords: 64,
            psc_depth: 64,
            seed: 42,
            random_probes: 10,
            series_tol: crate::seqspace::DEFAULT_SERIES_TOL,
            deriv: DerivOpts::default(),
        }
    }
}

/// Probe points used when none are supplied: `0`, `x*`, `x* + e_1 / 2`,
/// `x* / 2` and seeded random points of the set, keeping those in the set.
pub fn default_probes(
    set: &SetDescriptor,
    space: &SpaceDescriptor,
    x: &Point,
    opts: &CertifyOpts,
) -> Vec<(String, Point)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut probes = vec![
        ("zero".to_string(), Point::zero()),
        ("x*".to_string(), x.clone()),
        ("x* + e_1/2".to_string(), x.axpy(0.5, &Point::basis(1))),
        ("x*/2".to_string(), x.scale(0.5)),
    ];
    for i in 0..opts.random_probes {
        probes.push((
            format!("random {i}"),
            crate::sample::sample_in_set(&mut rng, set, space),
        ));
    }
    probes.retain(|(_, p)| set.contains(space, p).unwrap_or(false));
    probes
}

/// User probes labelled by position, or the defaults when there are none.
pub(crate) fn probe_list(
    probes: &[Point],
    set: &SetDescriptor,
    space: &SpaceDescriptor,
    x: &Point,
    opts: &CertifyOpts,
) -> Vec<(String, Point)> {
    if probes.is_empty() {
        return default_probes(set, space, x, opts);
    }
    probes
        .iter()
        .enumerate()
        .map(|(i, p)| (format!("probe {i}"), p.clone()))
        .collect()
}
