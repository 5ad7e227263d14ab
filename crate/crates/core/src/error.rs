use thiserror::Error;

/// Errors raised by the sequence-space machinery, the function grammar and
/// the certifiers.
///
/// Verdict-level outcomes (a point is not a minimizer, a derivative does not
/// exist) are reported through [`crate::certify::Certificate`], not here.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pairing series is not certified absolutely convergent for the given tails")]
    NonConvergentPairing,

    #[error("series tail admits no summable majorant")]
    NoMajorant,

    #[error("tail bound {achieved:e} still above target {target:e} after {terms} terms")]
    ToleranceUnreachable {
        target: f64,
        achieved: f64,
        terms: usize,
    },

    #[error("sign of the tail beyond index {from} could not be decided")]
    UndecidableSign { from: usize },

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("negative scale factor {0}")]
    NegativeScale(f64),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(
        "difference quotients violate convex monotonicity at step {step}: {earlier} then {later} (noise {noise:e})"
    )]
    NonConvexBehavior {
        step: usize,
        earlier: f64,
        later: f64,
        noise: f64,
    },

    #[error("directional derivative is domain limited: only the {evaluable} side is evaluable")]
    DomainLimited { evaluable: &'static str },

    #[error("partial derivative along coordinate {0} does not exist")]
    PartialNotDifferentiable(usize),

    #[error("coordinate descent iterate left the box of radius {bound:e}")]
    Unbounded { bound: f64 },

    #[error("coordinate descent did not settle within {0} sweeps")]
    MaxSweeps(usize),

    #[error("point is not feasible: {0}")]
    InfeasiblePoint(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
