//! AR(1) trajectory simulation and least-squares pole estimation.
//!
//! The process is `y[t] = a0 * y[t-1] + e[t]` with e[t] ~ N(0, sigma^2)
//! i.i.d. Two initialization regimes are supported:
//!
//! * `StableStationary` (|a0| < 1): y[1] is drawn from the stationary law
//!   N(0, sigma^2 / (1 - a0^2)), so the trajectory is a sample of the
//!   stationary process.
//! * `UnstableZeroInit` (|a0| > 1): y[0] = 0, so y[1] = e[1] and the
//!   trajectory grows geometrically.
//!
//! The least-squares estimate from N samples is
//! `a_hat = sum(y[t] * y[t-1], t = 2..N) / sum(y[t]^2, t = 1..N-1)`.
//!
//! Noise is always drawn as unit normals and scaled by sigma afterwards, so
//! trajectories are exactly linear in sigma for a fixed seed: the estimate
//! is invariant under sigma rescaling (bit-exact for power-of-two factors).

use crate::error::{Error, Result};
use crate::rng::GaussianSource;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// |a0| < 1, stationary initial draw.
    StableStationary,
    /// |a0| > 1, deterministic zero initial state.
    UnstableZeroInit,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::StableStationary => "stable",
            Regime::UnstableZeroInit => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1Params {
    pub a0: f64,
    pub sigma: f64,
    pub regime: Regime,
    pub seed: u64,
}

impl Ar1Params {
    /// Validated constructor: the regime tag must match the pole location
    /// and sigma must be non-negative (zero is reserved for deterministic
    /// test trajectories started through [`simulate_from`]).
    pub fn new(a0: f64, sigma: f64, regime: Regime, seed: u64) -> Result<Ar1Params> {
        if !a0.is_finite() || !sigma.is_finite() {
            return Err(Error::domain("a0 and sigma must be finite"));
        }
        if sigma < 0.0 {
            return Err(Error::domain("sigma must be >= 0"));
        }
        match regime {
            Regime::StableStationary if a0.abs() >= 1.0 => {
                return Err(Error::RegimeMismatch { a0, expected: "|a0| < 1" });
            }
            Regime::UnstableZeroInit if a0.abs() <= 1.0 => {
                return Err(Error::RegimeMismatch { a0, expected: "|a0| > 1" });
            }
            _ => {}
        }
        Ok(Ar1Params { a0, sigma, regime, seed })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// y[1]..y[N]; all entries finite.
    pub samples: Vec<f64>,
    pub params: Ar1Params,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateResult {
    pub a_hat: f64,
    pub n: usize,
    /// Denominator sum(y[t]^2, t = 1..N-1); kept for diagnostics.
    pub denominator: f64,
}

/// Simulate N samples under the params' regime.
///
/// Errors: `Domain` for N < 2 or a zero-sigma stationary draw, `Overflow`
/// if any sample leaves f64 range (possible for large |a0| and N).
pub fn simulate(params: &Ar1Params, n: usize) -> Result<Trajectory> {
    if n < 2 {
        return Err(Error::domain("N must be >= 2"));
    }
    let mut gauss = GaussianSource::seed_from_u64(params.seed);
    let y1 = match params.regime {
        Regime::StableStationary => {
            if params.sigma == 0.0 {
                return Err(Error::domain(
                    "sigma must be > 0 for a stationary initial draw",
                ));
            }
            let stationary_sd = params.sigma / (1.0 - params.a0 * params.a0).sqrt();
            stationary_sd * gauss.next_gaussian()
        }
        // y[0] = 0, so the first sample is pure noise.
        Regime::UnstableZeroInit => params.sigma * gauss.next_gaussian(),
    };
    recurse(params, y1, &mut gauss, n)
}

/// Deterministic-start hook: simulate N samples from an explicit y[1],
/// skipping the regime's initial draw. With sigma = 0 this produces the
/// exact geometric sequence y[t] = a0^(t-1) * y[1], which is what the
/// zero-noise tests pin down.
pub fn simulate_from(params: &Ar1Params, y1: f64, n: usize) -> Result<Trajectory> {
    if n < 2 {
        return Err(Error::domain("N must be >= 2"));
    }
    if !y1.is_finite() {
        return Err(Error::domain("y1 must be finite"));
    }
    let mut gauss = GaussianSource::seed_from_u64(params.seed);
    recurse(params, y1, &mut gauss, n)
}

fn recurse(params: &Ar1Params, y1: f64, gauss: &mut GaussianSource, n: usize) -> Result<Trajectory> {
    let mut samples = Vec::with_capacity(n);
    if !y1.is_finite() {
        return Err(Error::Overflow { step: 1 });
    }
    samples.push(y1);
    let mut y = y1;
    for t in 2..=n {
        y = params.a0 * y + params.sigma * gauss.next_gaussian();
        if !y.is_finite() {
            return Err(Error::Overflow { step: t });
        }
        samples.push(y);
    }
    Ok(Trajectory { samples, params: *params })
}

/// Least-squares estimate of a0 from a trajectory of length >= 2.
///
/// Errors: `DegenerateDenominator` when every regressor y[1]..y[N-1] is
/// zero (probability zero for sigma > 0).
pub fn ls_estimate(traj: &Trajectory) -> Result<EstimateResult> {
    let y = &traj.samples;
    if y.len() < 2 {
        return Err(Error::domain("trajectory must hold at least 2 samples"));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for t in 1..y.len() {
        num += y[t] * y[t - 1];
        den += y[t - 1] * y[t - 1];
    }
    if den == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    Ok(EstimateResult { a_hat: num / den, n: y.len(), denominator: den })
}
