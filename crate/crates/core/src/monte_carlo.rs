//! Seeded, parallel Monte Carlo estimation of deviation probabilities
//! `P(a_hat - a0 > eps)` and of `E[(a_hat - a0)^2]`.
//!
//! Determinism contract: run `r` always simulates with the seed
//! `mix_seed(base_seed, r)` (a SplitMix64 stage), runs are aggregated in
//! fixed-size chunks, and chunk partials are folded in index order. The
//! chunk boundaries depend only on `runs`, so the result is a pure
//! function of the config: any rayon pool size, including 1, produces
//! bit-identical estimates.

use rayon::prelude::*;

use crate::ar1::{ls_estimate, simulate, simulate_from, Ar1Params};
use crate::error::{Error, Result};
use crate::rng::mix_seed;

/// Runs per aggregation chunk; fixed so that scheduling cannot influence
/// the arithmetic, small enough to parallelize modest run counts.
const CHUNK: u64 = 256;

/// z for a 95% interval.
const Z95: f64 = 1.959963984540054;

/// Which statistic an [`McEstimate`] describes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum McStatistic {
    /// Empirical probability of `a_hat - a0 > eps`.
    DeviationProb { eps: f64 },
    /// Empirical mean of `(a_hat - a0)^2`.
    Variance,
}

/// Monte Carlo experiment description.
///
/// `params.seed` is ignored; each run derives its own seed from
/// `base_seed` and the run index.
#[derive(Clone, Debug)]
pub struct McConfig {
    pub params: Ar1Params,
    /// Trajectory length N.
    pub n: usize,
    pub runs: u64,
    pub base_seed: u64,
    /// Deviation thresholds, strictly increasing, all >= 0.
    pub eps_grid: Vec<f64>,
    /// Start the trajectory at this fixed value instead of drawing the
    /// initial sample. This is the deterministic hook that makes
    /// `sigma = 0` meaningful (the trajectory is then exactly geometric).
    pub fixed_start: Option<f64>,
}

impl McConfig {
    pub fn new(
        params: Ar1Params,
        n: usize,
        runs: u64,
        base_seed: u64,
        eps_grid: Vec<f64>,
    ) -> Result<Self> {
        let cfg = McConfig { params, n, runs, base_seed, eps_grid, fixed_start: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_fixed_start(mut self, y1: f64) -> Self {
        self.fixed_start = Some(y1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::domain(format!("N must be >= 2, got {}", self.n)));
        }
        if self.runs < 1 {
            return Err(Error::domain("runs must be >= 1"));
        }
        for eps in &self.eps_grid {
            if !eps.is_finite() || *eps < 0.0 {
                return Err(Error::domain(format!("eps thresholds must be >= 0, got {eps}")));
            }
        }
        if self.eps_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("eps_grid must be strictly increasing"));
        }
        if let Some(y1) = self.fixed_start {
            if !y1.is_finite() {
                return Err(Error::domain("fixed_start must be finite"));
            }
        }
        Ok(())
    }
}

/// One estimated statistic with uncertainty.
///
/// `runs` is the total requested count; `failed_runs` of them hit a
/// degenerate least-squares denominator and are excluded from `value`
/// (possible only in contrived settings, e.g. an all-zero trajectory).
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub statistic: McStatistic,
    pub value: f64,
    pub runs: u64,
    pub std_err: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub failed_runs: u64,
    /// Set on variance estimates with N < 7: the closed-form variance
    /// bound diverges there, so the empirical value has no bound to sit
    /// under and heavy tails make it noisy.
    pub small_n_caveat: bool,
}

/// `a_hat - a0` for run `r`, or `None` when the denominator degenerates.
fn run_deviation(cfg: &McConfig, r: u64) -> Result<Option<f64>> {
    let params = Ar1Params { seed: mix_seed(cfg.base_seed, r), ..cfg.params };
    let traj = match cfg.fixed_start {
        Some(y1) => simulate_from(&params, y1, cfg.n)?,
        None => simulate(&params, cfg.n)?,
    };
    match ls_estimate(&traj) {
        Ok(est) => Ok(Some(est.a_hat - cfg.params.a0)),
        Err(Error::DegenerateDenominator) => Ok(None),
        Err(e) => Err(e),
    }
}

fn chunk_bounds(runs: u64) -> Vec<(u64, u64)> {
    (0..runs.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, (c * CHUNK + CHUNK).min(runs)))
        .collect()
}

/// Wilson score 95% interval for `successes / n`.
fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

struct Kahan {
    acc: f64,
    comp: f64,
}

impl Kahan {
    fn new() -> Self {
        Kahan { acc: 0.0, comp: 0.0 }
    }

    fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.acc + y;
        self.comp = (t - self.acc) - y;
        self.acc = t;
    }

    fn total(&self) -> f64 {
        self.acc
    }
}

/// Empirical `P(a_hat - a0 > eps)` for every threshold in `eps_grid`,
/// from one shared set of runs (so the estimates are exactly
/// non-increasing along the grid). Wilson 95% intervals; probabilities
/// below ~3/runs are unresolvable at the configured run count.
pub fn estimate_deviation_probs(cfg: &McConfig) -> Result<Vec<McEstimate>> {
    cfg.validate()?;
    if cfg.eps_grid.is_empty() {
        return Ok(Vec::new());
    }
    struct ProbChunk {
        counts: Vec<u64>,
        failed: u64,
    }
    let chunks: Result<Vec<ProbChunk>> = chunk_bounds(cfg.runs)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut counts = vec![0u64; cfg.eps_grid.len()];
            let mut failed = 0u64;
            for r in lo..hi {
                match run_deviation(cfg, r)? {
                    Some(dev) => {
                        for (k, &eps) in cfg.eps_grid.iter().enumerate() {
                            if dev > eps {
                                counts[k] += 1;
                            } else {
                                break; // grid ascending: no later threshold passes
                            }
                        }
                    }
                    None => failed += 1,
                }
            }
            Ok(ProbChunk { counts, failed })
        })
        .collect();
    let chunks = chunks?;

    let mut counts = vec![0u64; cfg.eps_grid.len()];
    let mut failed = 0u64;
    for c in &chunks {
        failed += c.failed;
        for (total, part) in counts.iter_mut().zip(&c.counts) {
            *total += part;
        }
    }
    let n_eff = cfg.runs - failed;
    if n_eff == 0 {
        return Err(Error::DegenerateDenominator);
    }

    Ok(cfg
        .eps_grid
        .iter()
        .zip(&counts)
        .map(|(&eps, &successes)| {
            let value = successes as f64 / n_eff as f64;
            let (ci_low, ci_high) = wilson_interval(successes, n_eff);
            McEstimate {
                statistic: McStatistic::DeviationProb { eps },
                value,
                runs: cfg.runs,
                std_err: (value * (1.0 - value) / n_eff as f64).sqrt(),
                ci_low: ci_low.min(value),
                ci_high: ci_high.max(value),
                failed_runs: failed,
                small_n_caveat: false,
            }
        })
        .collect())
}

/// Empirical `E[(a_hat - a0)^2]` with a standard error from the
/// fourth-moment estimate.
pub fn estimate_variance(cfg: &McConfig) -> Result<McEstimate> {
    cfg.validate()?;
    struct VarChunk {
        s2: f64,
        s4: f64,
        failed: u64,
    }
    let chunks: Result<Vec<VarChunk>> = chunk_bounds(cfg.runs)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut s2 = Kahan::new();
            let mut s4 = Kahan::new();
            let mut failed = 0u64;
            for r in lo..hi {
                match run_deviation(cfg, r)? {
                    Some(dev) => {
                        let d2 = dev * dev;
                        s2.add(d2);
                        s4.add(d2 * d2);
                    }
                    None => failed += 1,
                }
            }
            Ok(VarChunk { s2: s2.total(), s4: s4.total(), failed })
        })
        .collect();
    let chunks = chunks?;

    let mut s2 = Kahan::new();
    let mut s4 = Kahan::new();
    let mut failed = 0u64;
    for c in &chunks {
        s2.add(c.s2);
        s4.add(c.s4);
        failed += c.failed;
    }
    let n_eff = cfg.runs - failed;
    if n_eff == 0 {
        return Err(Error::DegenerateDenominator);
    }

    let nf = n_eff as f64;
    let value = s2.total() / nf;
    let m4 = s4.total() / nf;
    let std_err = ((m4 - value * value).max(0.0) / nf).sqrt();
    Ok(McEstimate {
        statistic: McStatistic::Variance,
        value,
        runs: cfg.runs,
        std_err,
        ci_low: (value - Z95 * std_err).max(0.0),
        ci_high: value + Z95 * std_err,
        failed_runs: failed,
        small_n_caveat: cfg.n < 7,
    })
}
