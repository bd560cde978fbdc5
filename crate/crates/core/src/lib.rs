//! Premium principles on Orlicz spaces.
//!
//! The library computes Haezendonck-Goovaerts premiums
//! `π_α(X) = inf_m { m + N_α((X − m)⁺) }` for laws given either as finite
//! discrete distributions or as quantile functions over `(0, 1)`, together
//! with the surrounding machinery: a catalog of Orlicz gauges with conjugates
//! and generalized inverses, Luxemburg and Orlicz norms, Expected Shortfall
//! and lower quantiles, finite-space dual representations with feasibility
//! certificates, and a lab of reproducible stability experiments (monotone
//! and dominated convergence, the non-Δ2 continuity failures, and the
//! plain-distributional counterexample).

pub mod duality;
pub mod error;
pub mod norms;
pub mod orlicz;
pub mod premium;
pub mod quadrature;
pub mod randvar;
pub mod stability;

mod solve;

pub use error::{CoreError, Result};
pub use norms::{dual_norm_oracle, luxemburg_norm, luxemburg_norm_with, n_alpha, n_alpha_with, orlicz_norm, NormResult};
pub use orlicz::{
    check_delta2, ConjugateGauge, Delta2Diagnostic, Gauge, OrliczFunction, PhiDescriptor,
    ScaledOrlicz, DELTA2_DEFAULT_THRESHOLD,
};
pub use premium::{
    coarsening_bound_check, expected_shortfall, premium, premium_at, premium_at_with,
    premium_with, var, CoarseningBound, HalfLineEval, PremiumResult, Tolerances,
};
pub use quadrature::IntegralValue;
pub use randvar::{
    families, Atom, DiscreteRV, QuantileRV, RandomVariable, SpaceMembership, Transform,
};
