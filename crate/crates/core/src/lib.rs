//! Finite-sample analysis toolkit for least-squares identification of the
//! scalar AR(1) process `y[t] = a0 * y[t-1] + e[t]` with Gaussian noise.
//!
//! The crate has four layers:
//!
//! * [`ar1`] simulates trajectories in the stable (stationary start) and
//!   unstable (zero start) regimes and computes the least-squares estimate
//!   of `a0`.
//! * [`bounds`] evaluates closed-form upper bounds on the deviation
//!   probability `P(a_hat - a0 > eps)` and on `E[(a_hat - a0)^2]`, plus the
//!   asymptotic Cramer-Rao reference curve.
//! * [`linalg`] is the oracle layer: it builds the exact noise covariance
//!   matrices, evaluates the determinant form of the deviation bound by
//!   direct factorization, and checks the matrix identities (tridiagonal
//!   inverse, continuant recursion, perturbed eigenvalues, Szego factor)
//!   that the closed forms rely on.
//! * [`monte_carlo`] estimates the same quantities empirically with a
//!   deterministic, worker-count-independent parallel harness.
//!
//! [`validation`] bundles the identity and dominance checks into a single
//! suite consumed by the CLI and the acceptance tests.

pub mod ar1;
pub mod bounds;
pub mod dd;
mod error;
pub mod linalg;
pub mod logdomain;
pub mod monte_carlo;
pub mod quad;
pub mod rng;
pub mod validation;

pub use ar1::{ls_estimate, simulate, simulate_from, Ar1Params, EstimateResult, Regime, Trajectory};
pub use bounds::{
    cramer_rao_asymptote, relaxed_unstable_bound, stable_deviation_bound, stable_variance_bound,
    unstable_deviation_bound, unstable_roots, unstable_variance_bound, xstar_zstar, BoundKind,
    BoundValue, DeviationQuery, RootPair,
};
pub use error::{Error, Result};
pub use linalg::{
    build_covariance, continuant_closed_form, continuant_identity_lhs,
    det_quotient_monotonicity_check, exact_det_bound, inverse_identity_residual,
    perturbed_tridiag_eigenvalues, szego_log_factor, toeplitz_logdets, tridiag_det_sequence,
    CovKind, CovarianceMatrix, TridiagonalSpec,
};
pub use monte_carlo::{estimate_deviation_probs, estimate_variance, McConfig, McEstimate, McStatistic};
pub use validation::{run_checks, CheckResult, FaultInjection};
