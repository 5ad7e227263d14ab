//! Convex functions on sequence spaces: grammar, evaluation and closed-form
//! coordinate derivatives.

mod analytic;
mod eval;
mod expr;
mod scalar;
pub mod symbolic;

pub use analytic::{
    analytic_dir_deriv, derivative_envelope, derivative_form, is_continuous, one_sided,
    tail_existence, AnalyticDeriv, DerivativeForm, Existence,
};
pub use eval::{check_domain, domain_violation, evaluate, evaluate_ext, evaluate_sum, increment};
pub use expr::{
    combine_sum, example3_minimizer, example3_objective, example4_minimizer, example4_objective,
    example5_objective, l1_norm, lower_bound_constraint, scale, subtract_linear, weighted_square,
    FunctionExpr,
};
pub use scalar::{Coef, ScalarConvex};
