//! Spectral closed forms: eigenvalues of the rank-one-completed
//! tridiagonal inverse, and the Szego log-factor that captures the
//! large-N growth rate of the stationary determinant quotients.

use std::f64::consts::PI;

use crate::bounds::CharRoots;
use crate::error::{Error, Result};

/// Eigenvalues of the full `(-a0, a0^2 + 1, -a0)` tridiagonal Toeplitz
/// matrix of the given size (the inverse-covariance tridiagonal completed
/// by the rank-one corner term):
/// `lambda_k = a0^2 + 1 - 2|a0| cos(k pi / (dim + 1))`, ascending.
/// Every eigenvalue is at least `(|a0| - 1)^2 > 0`.
pub fn perturbed_tridiag_eigenvalues(a0: f64, dim: usize) -> Result<Vec<f64>> {
    if !a0.is_finite() || a0.abs() <= 1.0 {
        return Err(Error::RegimeMismatch { a0, expected: "|a0| > 1" });
    }
    if dim < 1 {
        return Err(Error::domain("dimension must be >= 1"));
    }
    let base = a0 * a0 + 1.0;
    let two_abs = 2.0 * a0.abs();
    let denom = dim as f64 + 1.0;
    Ok((1..=dim)
        .map(|k| base - two_abs * (k as f64 * PI / denom).cos())
        .collect())
}

/// Closed form `ln(S + sqrt(S^2 - a0^2))` with `S = (1 + a0^2 + eps^2)/2`:
/// the value of `(1/2pi) \int ln(1 + eps^2 / |e^{jw} - a0|^2) dw`, i.e. the
/// asymptotic per-step log-growth of `det(I + eps^2 R_n)`. Evaluated as
/// `ln(lambda2)` through the cancellation-safe root decomposition.
pub fn szego_log_factor(a0: f64, eps: f64) -> Result<f64> {
    if !a0.is_finite() || a0.abs() >= 1.0 {
        return Err(Error::RegimeMismatch { a0, expected: "|a0| < 1" });
    }
    if !eps.is_finite() || eps < 0.0 || !(eps * eps).is_finite() {
        return Err(Error::domain(format!(
            "eps must be >= 0 with eps^2 finite, got {eps}"
        )));
    }
    Ok(CharRoots::from_eps(a0, eps).ln_lambda2())
}
