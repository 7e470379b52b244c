//! Closed-form upper bounds on the least-squares estimation error of an
//! AR(1) coefficient: deviation bounds `P(a_hat - a0 > eps)` for the stable
//! and unstable regimes, a relaxed unstable bound, variance bounds for
//! `N >= 7`, and the asymptotic Cramer-Rao reference curve.
//!
//! Everything that contains `lambda^N` or `|a0|^{cN}` is evaluated in log
//! domain; the characteristic roots come from [`CharRoots`], which avoids
//! the cancellation of the textbook quadratic formula near `eps = 0` and
//! `|a0| = 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logdomain::log_sum_exp;

/// Parameters of a deviation-probability query: coefficient `a0`, threshold
/// `eps >= 0`, and sample size `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationQuery {
    pub a0: f64,
    pub eps: f64,
    pub n: u64,
}

impl DeviationQuery {
    pub fn new(a0: f64, eps: f64, n: u64) -> Result<Self> {
        if !a0.is_finite() {
            return Err(Error::domain("a0 must be finite"));
        }
        if !(eps >= 0.0) || !(eps * eps).is_finite() {
            return Err(Error::domain("eps must satisfy 0 <= eps < 1.4e154"));
        }
        if n < 2 {
            return Err(Error::domain("sample size N must be >= 2"));
        }
        Ok(Self { a0, eps, n })
    }
}

/// The two roots `0 < lambda1 <= lambda2` of
/// `z^2 - (1 + a0^2 + eps^2) z + a0^2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootPair {
    pub lambda1: f64,
    pub lambda2: f64,
}

/// Which bound a [`BoundValue`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    StableDeviation,
    UnstableDeviation,
    RelaxedUnstableDeviation,
    StableVariance,
    UnstableVariance,
    CramerRaoAsymptotic,
}

/// A bound evaluation together with the query it answers. Deviation kinds
/// lie in [0, 1], reaching 0 only when the true value underflows f64 (huge
/// `N * eps`); variance kinds are positive. `eps` is `None` for the variance
/// kinds, which do not take a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    pub kind: BoundKind,
    pub a0: f64,
    pub eps: Option<f64>,
    pub n: u64,
}

/// Cancellation-safe pieces of the characteristic-root pair, parameterized
/// by `eps^2` so callers integrating over `x = eps^2` skip the square root.
///
/// Invariant: `one_minus_lambda1 * lambda2_minus_one = eps^2` exactly in
/// real arithmetic; both factors are computed without subtracting nearly
/// equal quantities.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CharRoots {
    /// `1 - lambda1`; positive for eps > 0.
    pub one_minus_lambda1: f64,
    /// `lambda2 - 1`; positive for eps > 0 or |a0| > 1.
    pub lambda2_minus_one: f64,
    /// `lambda2 - lambda1 = sqrt(((1-a0)^2 + eps^2)((1+a0)^2 + eps^2))`.
    pub diff: f64,
}

impl CharRoots {
    pub fn from_eps_squared(a0: f64, eps2: f64) -> Self {
        // (1 + a0^2 + eps2)^2 - 4 a0^2 factors exactly into the product
        // below, which has no cancellation for any sign of a0.
        let m1 = (1.0 - a0) * (1.0 - a0) + eps2;
        let m2 = (1.0 + a0) * (1.0 + a0) + eps2;
        let diff = (m1 * m2).sqrt();
        let c = a0 * a0 + eps2 - 1.0;
        let (u, v);
        if c >= 0.0 {
            v = 0.5 * (c + diff);
            u = if v == 0.0 { 0.0 } else { eps2 / v };
        } else {
            u = 0.5 * (diff - c);
            v = if u == 0.0 { 0.0 } else { eps2 / u };
        }
        CharRoots { one_minus_lambda1: u, lambda2_minus_one: v, diff }
    }

    pub fn from_eps(a0: f64, eps: f64) -> Self {
        Self::from_eps_squared(a0, eps * eps)
    }

    pub fn lambda2(&self) -> f64 {
        1.0 + self.lambda2_minus_one
    }

    pub fn ln_lambda2(&self) -> f64 {
        self.lambda2_minus_one.ln_1p()
    }
}

fn require_stable(a0: f64, what: &str) -> Result<()> {
    if a0.is_finite() && a0.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} requires |a0| < 1")))
    }
}

fn require_unstable(a0: f64, what: &str) -> Result<()> {
    if a0.is_finite() && a0.abs() > 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} requires |a0| > 1")))
    }
}

/// Stable-regime deviation bound
/// `((1-a0^2)/(1-a0^2+eps^2))^{1/4} * lambda2^{-(N-2)/4}`.
///
/// Requires `|a0| < 1`; equals exactly 1 at `eps = 0`.
pub fn stable_deviation_bound(q: DeviationQuery) -> Result<BoundValue> {
    require_stable(q.a0, "the stable deviation bound")?;
    let value = if q.eps == 0.0 {
        1.0
    } else {
        let one_minus_a0sq = (1.0 - q.a0) * (1.0 + q.a0);
        let eps2 = q.eps * q.eps;
        let roots = CharRoots::from_eps_squared(q.a0, eps2);
        let ln_first = -0.25 * (eps2 / one_minus_a0sq).ln_1p();
        let ln_second = -0.25 * (q.n as f64 - 2.0) * roots.ln_lambda2();
        (ln_first + ln_second).exp()
    };
    Ok(BoundValue { value, kind: BoundKind::StableDeviation, a0: q.a0, eps: Some(q.eps), n: q.n })
}

/// Stable-regime variance bound `8/(N-6) - 8 a0^2/(N+2)`, valid for
/// `N >= 7` (the underlying integral diverges for smaller N).
pub fn stable_variance_bound(a0: f64, n: u64) -> Result<BoundValue> {
    require_stable(a0, "the stable variance bound")?;
    if n < 7 {
        return Err(Error::domain("N must be >= 7 for variance bounds"));
    }
    let value = 8.0 / (n as f64 - 6.0) - 8.0 * a0 * a0 / (n as f64 + 2.0);
    Ok(BoundValue { value, kind: BoundKind::StableVariance, a0, eps: None, n })
}

/// Roots of the characteristic quadratic for `|a0| > 1`, with `lambda2`
/// from the additive branch and `lambda1 = a0^2 / lambda2` so neither side
/// suffers cancellation.
pub fn unstable_roots(a0: f64, eps: f64) -> Result<RootPair> {
    require_unstable(a0, "the characteristic root pair")?;
    if !(eps >= 0.0) || !(eps * eps).is_finite() {
        return Err(Error::domain("eps must satisfy 0 <= eps < 1.4e154"));
    }
    let roots = CharRoots::from_eps(a0, eps);
    let lambda2 = roots.lambda2();
    Ok(RootPair { lambda1: a0 * a0 / lambda2, lambda2 })
}

/// Unstable-regime deviation bound
/// `((lambda2-lambda1) / ((1-lambda1) lambda2^N + (lambda2-1) lambda1^N))^{1/4}`.
///
/// The denominator is a sum of two positive terms, combined in log domain
/// so `lambda2^N` cannot overflow. Requires `|a0| > 1`; equals exactly 1 at
/// `eps = 0`.
pub fn unstable_deviation_bound(q: DeviationQuery) -> Result<BoundValue> {
    require_unstable(q.a0, "the unstable deviation bound")?;
    let value = if q.eps == 0.0 {
        1.0
    } else {
        let roots = CharRoots::from_eps(q.a0, q.eps);
        let n = q.n as f64;
        let ln_l2 = roots.ln_lambda2();
        let ln_l1 = 2.0 * q.a0.abs().ln() - ln_l2;
        let ln_den = log_sum_exp(
            roots.one_minus_lambda1.ln() + n * ln_l2,
            roots.lambda2_minus_one.ln() + n * ln_l1,
        );
        (0.25 * (roots.diff.ln() - ln_den)).exp()
    };
    Ok(BoundValue { value, kind: BoundKind::UnstableDeviation, a0: q.a0, eps: Some(q.eps), n: q.n })
}

/// Relaxed unstable deviation bound
/// `min{1, lambda2^{-N/4} ((lambda2-lambda1)/(1-lambda1))^m}` for a fixed
/// exponent `m >= 1/4`.
///
/// Requires `|a0| > 1` and `eps > 0` (at `eps = 0` the ratio degenerates).
pub fn relaxed_unstable_bound(q: DeviationQuery, m: f64) -> Result<BoundValue> {
    require_unstable(q.a0, "the relaxed unstable bound")?;
    if !(m >= 0.25) {
        return Err(Error::domain("relaxation exponent m must be >= 1/4"));
    }
    if q.eps == 0.0 {
        return Err(Error::domain(
            "the relaxed unstable bound is undefined at eps = 0 (lambda1 = 1)",
        ));
    }
    let roots = CharRoots::from_eps(q.a0, q.eps);
    let ln_val = -0.25 * q.n as f64 * roots.ln_lambda2()
        + m * (roots.diff.ln() - roots.one_minus_lambda1.ln());
    let value = if ln_val >= 0.0 { 1.0 } else { ln_val.exp() };
    Ok(BoundValue {
        value,
        kind: BoundKind::RelaxedUnstableDeviation,
        a0: q.a0,
        eps: Some(q.eps),
        n: q.n,
    })
}

/// The `(x*, z*)` pair used by the unstable variance derivation:
/// `x* = |a0|^{4 - N/(2m)} (N + 4m)/N` and `z* = a0^2 + x*`.
///
/// Requires `|a0| > 1`, `N >= 7`, `m >= 1/4`.
pub fn xstar_zstar(a0: f64, n: u64, m: f64) -> Result<(f64, f64)> {
    require_unstable(a0, "the x*/z* construction")?;
    if n < 7 {
        return Err(Error::domain("N must be >= 7 for the x*/z* construction"));
    }
    if !(m >= 0.25) {
        return Err(Error::domain("relaxation exponent m must be >= 1/4"));
    }
    let exponent = 4.0 - n as f64 / (2.0 * m);
    let xstar = a0.abs().powf(exponent) * ((n as f64 + 4.0 * m) / n as f64);
    Ok((xstar, a0 * a0 + xstar))
}

/// Unstable-regime variance bound
/// `|a0|^{-2N/5} [2 a0^4 (N+5)/N + 8 (N/(N+5))^{1/4} (a0^2/(N-6) - 1/(N+2))]`,
/// valid for `N >= 7`. The exponential prefactor is evaluated in log domain.
pub fn unstable_variance_bound(a0: f64, n: u64) -> Result<BoundValue> {
    require_unstable(a0, "the unstable variance bound")?;
    if n < 7 {
        return Err(Error::domain("N must be >= 7 for variance bounds"));
    }
    let nf = n as f64;
    let a2 = a0 * a0;
    let prefactor = (-0.4 * nf * a0.abs().ln()).exp();
    let bracket = 2.0 * a2 * a2 * (nf + 5.0) / nf
        + 8.0 * (nf / (nf + 5.0)).powf(0.25) * (a2 / (nf - 6.0) - 1.0 / (nf + 2.0));
    Ok(BoundValue {
        value: prefactor * bracket,
        kind: BoundKind::UnstableVariance,
        a0,
        eps: None,
        n,
    })
}

/// Asymptotic Cramer-Rao reference curve `(1 - a0^2)/(N - 1)`. A large-N
/// reference, not a guaranteed finite-sample bound.
///
/// Requires `|a0| < 1` and `N >= 2`.
pub fn cramer_rao_asymptote(a0: f64, n: u64) -> Result<f64> {
    require_stable(a0, "the Cramer-Rao asymptote")?;
    if n < 2 {
        return Err(Error::domain("sample size N must be >= 2"));
    }
    Ok((1.0 - a0) * (1.0 + a0) / (n as f64 - 1.0))
}
