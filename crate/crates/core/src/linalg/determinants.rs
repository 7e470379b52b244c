//! Dense determinant oracle for the Gram matrix `I + (eps^2/sigma^2) Cov`.
//!
//! The factorization runs over the packed lower triangle in 256-bit
//! arithmetic throughout: unstable covariances hold entries near
//! `a0^{2N}` whose Gram has O(1) pivots, so the determinant lives
//! entirely in digits that f64 (and double-double) storage has already
//! discarded. Only the final `ln` of each pivot drops to f64.

use super::covariance::scaled_gram_hp;
use super::hp::Hp;
use crate::error::{Error, Result};

#[inline]
fn packed(i: usize, j: usize) -> usize {
    i * (i + 1) / 2 + j
}

/// In-place LDL^T of a packed symmetric positive-definite matrix,
/// returning the running log-determinants of every leading section
/// (partial products of the pivots).
fn ldlt_partial_logdets(mut a: Vec<Hp>, dim: usize) -> Result<Vec<f64>> {
    let mut d: Vec<Hp> = Vec::with_capacity(dim);
    let mut partials = Vec::with_capacity(dim);
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for j in 0..dim {
        let mut pivot = a[packed(j, j)].clone();
        for k in 0..j {
            let l = &a[packed(j, k)];
            pivot = pivot.sub(&l.mul(l).mul(&d[k]));
        }
        if !pivot.is_strictly_positive() {
            return Err(Error::NumericalFailure(format!(
                "symmetric factorization failed: pivot {j} is not positive"
            )));
        }
        let y = pivot.to_f64().ln() - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        partials.push(acc);
        for i in (j + 1)..dim {
            let mut v = a[packed(i, j)].clone();
            for k in 0..j {
                v = v.sub(&a[packed(i, k)].mul(&a[packed(j, k)]).mul(&d[k]));
            }
            a[packed(i, j)] = v.div(&pivot);
        }
        d.push(pivot);
    }
    Ok(partials)
}

/// Deviation bound in its determinant form,
/// `det^{-1/4}(I + (eps^2/sigma^2) Cov)` with `Cov` the regime-appropriate
/// `(N-1)`-dimensional covariance, evaluated by dense symmetric
/// factorization. Cost is O(N^3) high-precision operations; this is the
/// reference the closed forms are judged against, not a production path.
/// The value is independent of `sigma` (the builder's `sigma^2` cancels).
pub fn exact_det_bound(a0: f64, sigma: f64, eps: f64, n: u64) -> Result<f64> {
    if !a0.is_finite() || !sigma.is_finite() || !eps.is_finite() {
        return Err(Error::domain("a0, sigma, and eps must be finite"));
    }
    if n < 2 {
        return Err(Error::domain(format!("N must be >= 2, got {n}")));
    }
    if eps <= 0.0 {
        return Err(Error::domain(format!("eps must be > 0, got {eps}")));
    }
    if sigma <= 0.0 {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    if a0.abs() == 1.0 {
        return Err(Error::RegimeMismatch { a0, expected: "|a0| != 1" });
    }
    let dim = (n - 1) as usize;
    let gram = scaled_gram_hp(a0, sigma, eps, dim);
    let partials = ldlt_partial_logdets(gram, dim)?;
    let logdet = *partials.last().expect("dim >= 1");
    Ok((-0.25 * logdet).exp())
}

/// Log-determinants of `I + eps^2 R_n` for every stationary Toeplitz
/// section `n = 1..upto` (unit sigma), from a single factorization: the
/// leading minors of a symmetric factorization are the partial pivot
/// products.
pub fn toeplitz_logdets(a0: f64, eps: f64, upto: usize) -> Result<Vec<f64>> {
    if !a0.is_finite() || a0.abs() >= 1.0 {
        return Err(Error::RegimeMismatch { a0, expected: "|a0| < 1" });
    }
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::domain(format!("eps must be > 0, got {eps}")));
    }
    if upto < 1 {
        return Err(Error::domain("upto must be >= 1"));
    }
    let gram = scaled_gram_hp(a0, 1.0, eps, upto);
    ldlt_partial_logdets(gram, upto)
}

/// True iff the determinant quotients `det(T_{n+1})/det(T_n)` are
/// non-increasing in `n` over the whole range (up to a relative slack of
/// 1e-10), where `T_n = I + eps^2 R_n` on the stationary family. The
/// comparison runs on log-determinants, so the slack enters as
/// `ln(1 + 1e-10)`.
pub fn det_quotient_monotonicity_check(a0: f64, eps: f64, upto: usize) -> Result<bool> {
    if upto < 3 {
        return Err(Error::domain(format!(
            "monotonicity check needs upto >= 3, got {upto}"
        )));
    }
    let ld = toeplitz_logdets(a0, eps, upto)?;
    let slack = 1e-10f64.ln_1p();
    for i in 1..upto - 1 {
        if ld[i + 1] - ld[i] > ld[i] - ld[i - 1] + slack {
            return Ok(false);
        }
    }
    Ok(true)
}
