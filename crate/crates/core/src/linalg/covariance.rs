//! Exact covariance matrices of the regressor vector `(y_1, ..., y_dim)`
//! and the tridiagonal-inverse residual check for the unstable family.

use nalgebra::DMatrix;

use super::hp::Hp;
use crate::dd::Dd;
use crate::error::{Error, Result};

/// Which covariance family an instance belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CovKind {
    /// `|a0| < 1`, process started from its stationary distribution:
    /// `entry(i, j) = sigma^2 * a0^|i-j| / (1 - a0^2)`.
    StationaryToeplitz,
    /// `|a0| > 1`, process started from zero:
    /// `entry(i, j) = sigma^2 * a0^|i-j| * g(min(i, j))` with
    /// `g(1) = 1`, `g(m) = 1 + a0^2 * g(m-1)` (1-based indices).
    UnstableZeroInit,
}

/// Dense symmetric positive-definite covariance of `(y_1, ..., y_dim)`.
#[derive(Clone, Debug)]
pub struct CovarianceMatrix {
    pub entries: DMatrix<f64>,
    pub kind: CovKind,
    pub a0: f64,
    pub sigma: f64,
}

fn check_cov_inputs(kind: CovKind, a0: f64, sigma: f64, dim: usize) -> Result<()> {
    if !a0.is_finite() || !sigma.is_finite() {
        return Err(Error::domain("a0 and sigma must be finite"));
    }
    if sigma <= 0.0 {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    if dim < 1 {
        return Err(Error::domain("covariance dimension must be >= 1"));
    }
    match kind {
        CovKind::StationaryToeplitz if a0.abs() >= 1.0 => Err(Error::RegimeMismatch {
            a0,
            expected: "|a0| < 1",
        }),
        CovKind::UnstableZeroInit if a0.abs() <= 1.0 => Err(Error::RegimeMismatch {
            a0,
            expected: "|a0| > 1",
        }),
        _ => Ok(()),
    }
}

/// Signed powers `a0^0 .. a0^(dim-1)`, failing on overflow.
fn signed_powers(a0: f64, dim: usize) -> Result<Vec<f64>> {
    let mut pows = vec![1.0; dim];
    for k in 1..dim {
        pows[k] = pows[k - 1] * a0;
        if !pows[k].is_finite() {
            return Err(Error::Overflow { step: k });
        }
    }
    Ok(pows)
}

/// Cumulative noise gains `g(1) .. g(dim)` of the zero-start process,
/// evaluated by the recursion `g(m) = 1 + a0^2 g(m-1)`; this form has no
/// cancellation for any `|a0| > 1`.
fn unstable_gains(a0: f64, dim: usize) -> Result<Vec<f64>> {
    let a2 = a0 * a0;
    let mut g = vec![1.0; dim];
    for m in 1..dim {
        g[m] = 1.0 + a2 * g[m - 1];
        if !g[m].is_finite() {
            return Err(Error::Overflow { step: m + 1 });
        }
    }
    Ok(g)
}

/// Builds the exact covariance matrix of the first `dim` samples.
pub fn build_covariance(kind: CovKind, a0: f64, sigma: f64, dim: usize) -> Result<CovarianceMatrix> {
    check_cov_inputs(kind, a0, sigma, dim)?;
    let s2 = sigma * sigma;
    if !s2.is_finite() {
        return Err(Error::Overflow { step: 0 });
    }
    let pows = signed_powers(a0, dim)?;
    let entries = match kind {
        CovKind::StationaryToeplitz => {
            let scale = s2 / ((1.0 - a0) * (1.0 + a0));
            DMatrix::from_fn(dim, dim, |i, j| scale * pows[i.abs_diff(j)])
        }
        CovKind::UnstableZeroInit => {
            let g = unstable_gains(a0, dim)?;
            DMatrix::from_fn(dim, dim, |i, j| s2 * pows[i.abs_diff(j)] * g[i.min(j)])
        }
    };
    if let Some(bad) = entries.iter().position(|e| !e.is_finite()) {
        return Err(Error::Overflow { step: bad });
    }
    Ok(CovarianceMatrix { entries, kind, a0, sigma })
}

/// Packed lower triangle (row-major, `idx(i,j) = i(i+1)/2 + j`) of
/// `I + (eps^2/sigma^2) * Cov` in 256-bit arithmetic, with the regime
/// inferred from `|a0|`. Every entry is assembled from the exact f64
/// inputs; rounding the scaled Gram itself to f64 loses the determinant
/// at unstable grid corners.
///
/// Callers validate `|a0| != 1`, `sigma > 0`, `dim >= 1` beforehand.
pub(crate) fn scaled_gram_hp(a0: f64, sigma: f64, eps: f64, dim: usize) -> Vec<Hp> {
    let one = Hp::one();
    let a = Hp::from_f64(a0);
    let e = Hp::from_f64(eps);
    let s = Hp::from_f64(sigma);
    let s2 = s.mul(&s);
    let c = e.mul(&e).div(&s2);

    let mut apow = Vec::with_capacity(dim);
    apow.push(one.clone());
    for k in 1..dim {
        let next = apow[k - 1].mul(&a);
        apow.push(next);
    }

    let stable = a0.abs() < 1.0;
    let row_scale: Vec<Hp> = if stable {
        let denom = one.sub(&a).mul(&one.add(&a));
        vec![s2.div(&denom); dim]
    } else {
        let a2 = a.mul(&a);
        let mut g = Vec::with_capacity(dim);
        g.push(one.clone());
        for m in 1..dim {
            g.push(one.add(&a2.mul(&g[m - 1])));
        }
        g.iter().map(|gm| s2.mul(gm)).collect()
    };

    let mut packed = Vec::with_capacity(dim * (dim + 1) / 2);
    for i in 0..dim {
        for j in 0..=i {
            let cov = row_scale[j].mul(&apow[i - j]);
            let mut entry = c.mul(&cov);
            if i == j {
                entry = entry.add(&one);
            }
            packed.push(entry);
        }
    }
    packed
}

/// Max-abs entry of `Cov * M / sigma^2 - I` for the unstable family, where
/// `M` is the candidate tridiagonal inverse: diagonal `a0^2 + 1` except a
/// final `1`, off-diagonals `-a0`. A small residual certifies that
/// `sigma^2 * Cov^{-1}` really is that tridiagonal matrix.
///
/// Runs in double-double arithmetic: the product cancels entries of size
/// `~a0^{2 dim}` down to O(1), which plain f64 cannot resolve at the
/// larger dims this is checked on.
pub fn inverse_identity_residual(a0: f64, sigma: f64, dim: usize) -> Result<f64> {
    if !a0.is_finite() || a0.abs() <= 1.0 {
        return Err(Error::RegimeMismatch { a0, expected: "|a0| > 1" });
    }
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    if dim < 2 {
        return Err(Error::domain("inverse residual needs dim >= 2"));
    }

    let a = Dd::from_f64(a0);
    let a2 = a.mul(a);
    let s2 = Dd::from_f64(sigma).mul(Dd::from_f64(sigma));

    let mut apow = vec![Dd::ONE; dim];
    for k in 1..dim {
        apow[k] = apow[k - 1].mul(a);
        if !apow[k].to_f64().is_finite() {
            return Err(Error::Overflow { step: k });
        }
    }
    let mut g = vec![Dd::ONE; dim];
    for m in 1..dim {
        g[m] = Dd::ONE.add(a2.mul(g[m - 1]));
        if !g[m].to_f64().is_finite() {
            return Err(Error::Overflow { step: m + 1 });
        }
    }
    let r = |i: usize, j: usize| s2.mul(apow[i.abs_diff(j)]).mul(g[i.min(j)]);

    let diag_mid = a2.add(Dd::ONE);
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            // Column j of M has at most three entries.
            let dj = if j == dim - 1 { Dd::ONE } else { diag_mid };
            let mut p = r(i, j).mul(dj);
            if j > 0 {
                p = p.sub(r(i, j - 1).mul(a));
            }
            if j < dim - 1 {
                p = p.sub(r(i, j + 1).mul(a));
            }
            let mut resid = p.div(s2);
            if i == j {
                resid = resid.sub(Dd::ONE);
            }
            worst = worst.max(resid.abs().to_f64());
        }
    }
    if !worst.is_finite() {
        return Err(Error::Overflow { step: dim });
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ar1::{simulate, Ar1Params, Regime};
    use crate::rng::mix_seed;

    #[test]
    fn stationary_2x2_is_exact() {
        let cov = build_covariance(CovKind::StationaryToeplitz, 0.5, 1.0, 2).unwrap();
        // scale = 1/0.75 rounds to the same f64 as 4/3, and halving it is
        // exact, so the entries match the literal quotients bit-for-bit.
        assert_eq!(cov.entries[(0, 0)], 4.0 / 3.0);
        assert_eq!(cov.entries[(0, 1)], 2.0 / 3.0);
        assert_eq!(cov.entries[(1, 0)], 2.0 / 3.0);
        assert_eq!(cov.entries[(1, 1)], 4.0 / 3.0);
    }

    #[test]
    fn unstable_2x2_is_exact() {
        let cov = build_covariance(CovKind::UnstableZeroInit, 2.0, 1.0, 2).unwrap();
        assert_eq!(cov.entries[(0, 0)], 1.0);
        assert_eq!(cov.entries[(0, 1)], 2.0);
        assert_eq!(cov.entries[(1, 0)], 2.0);
        assert_eq!(cov.entries[(1, 1)], 5.0);
    }

    #[test]
    fn symmetric_and_positive_definite() {
        let cases = [
            (CovKind::StationaryToeplitz, -0.9),
            (CovKind::StationaryToeplitz, 0.5),
            (CovKind::StationaryToeplitz, 0.98),
            (CovKind::UnstableZeroInit, -2.0),
            (CovKind::UnstableZeroInit, 1.1),
            (CovKind::UnstableZeroInit, 1.5),
        ];
        for (kind, a0) in cases {
            for dim in [1usize, 5, 20] {
                let cov = build_covariance(kind, a0, 0.7, dim).unwrap();
                for i in 0..dim {
                    for j in 0..dim {
                        assert_eq!(cov.entries[(i, j)], cov.entries[(j, i)]);
                    }
                }
                assert!(
                    cov.entries.clone().cholesky().is_some(),
                    "not PD at a0={a0}, dim={dim}"
                );
            }
        }
    }

    #[test]
    fn matches_sample_covariance_of_simulated_trajectories() {
        let dim = 10;
        let runs = 1_000_000u64;
        let cov = build_covariance(CovKind::UnstableZeroInit, 1.1, 1.0, dim).unwrap();
        let base = Ar1Params::new(1.1, 1.0, Regime::UnstableZeroInit, 0).unwrap();

        let mut sums = vec![0.0f64; dim * dim];
        for r in 0..runs {
            let params = Ar1Params { seed: mix_seed(0x5eed_c0da, r), ..base };
            let traj = simulate(&params, dim).unwrap();
            let y = &traj.samples;
            for i in 0..dim {
                for j in 0..=i {
                    sums[i * dim + j] += y[i] * y[j];
                }
            }
        }

        for i in 0..dim {
            for j in 0..=i {
                let sample = sums[i * dim + j] / runs as f64;
                let exact = cov.entries[(i, j)];
                // Var(y_i y_j) = C_ii C_jj + C_ij^2 for zero-mean Gaussians.
                let se = ((cov.entries[(i, i)] * cov.entries[(j, j)] + exact * exact)
                    / runs as f64)
                    .sqrt();
                assert!(
                    (sample - exact).abs() <= 3.0 * se,
                    "entry ({i},{j}): sample {sample} vs exact {exact}, se {se}"
                );
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(build_covariance(CovKind::StationaryToeplitz, 0.5, 1.0, 0).is_err());
        assert!(build_covariance(CovKind::StationaryToeplitz, 0.5, 0.0, 3).is_err());
        assert!(build_covariance(CovKind::StationaryToeplitz, 0.5, -1.0, 3).is_err());
        assert!(matches!(
            build_covariance(CovKind::StationaryToeplitz, 1.5, 1.0, 3),
            Err(Error::RegimeMismatch { .. })
        ));
        assert!(matches!(
            build_covariance(CovKind::UnstableZeroInit, 0.5, 1.0, 3),
            Err(Error::RegimeMismatch { .. })
        ));
        assert!(build_covariance(CovKind::UnstableZeroInit, 1.0, 1.0, 3).is_err());
        assert!(build_covariance(CovKind::StationaryToeplitz, -1.0, 1.0, 3).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let err = build_covariance(CovKind::UnstableZeroInit, 2.0, 1.0, 600).unwrap_err();
        assert!(matches!(err, Error::Overflow { .. }), "got {err:?}");
    }

    #[test]
    fn residual_is_tiny_on_reference_cases() {
        assert!(inverse_identity_residual(2.0, 1.0, 2).unwrap() <= 1e-12);
        assert!(inverse_identity_residual(1.1, 3.0, 30).unwrap() <= 1e-8);
        assert!(inverse_identity_residual(1.5, 1.0, 50).unwrap() <= 1e-8);
        assert!(inverse_identity_residual(-1.3, 0.5, 25).unwrap() <= 1e-8);
    }

    #[test]
    fn residual_rejects_bad_inputs() {
        assert!(matches!(
            inverse_identity_residual(0.9, 1.0, 5),
            Err(Error::RegimeMismatch { .. })
        ));
        assert!(inverse_identity_residual(1.5, 1.0, 1).is_err());
        assert!(inverse_identity_residual(1.5, 0.0, 5).is_err());
    }
}
