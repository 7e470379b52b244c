//! Determinants of tridiagonal Toeplitz matrices via the classic
//! three-term recursion, and the continuant identity linking the
//! shifted-family determinants to the characteristic roots.

use crate::bounds::CharRoots;
use crate::error::{Error, Result};
use crate::logdomain::{log_sum_exp, LogScaled};

/// Constant-band tridiagonal matrix family: `alpha` on the sub-diagonal,
/// `beta` on the diagonal, `gamma` on the super-diagonal, up to `size`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TridiagonalSpec {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub size: usize,
}

impl TridiagonalSpec {
    pub fn new(alpha: f64, beta: f64, gamma: f64, size: usize) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::domain("tridiagonal bands must be finite"));
        }
        if size < 1 {
            return Err(Error::domain("tridiagonal size must be >= 1"));
        }
        Ok(TridiagonalSpec { alpha, beta, gamma, size })
    }
}

/// Determinants `det(T_1) .. det(T_upto)` of the leading sections, via
/// `det(T_k) = beta det(T_{k-1}) - alpha gamma det(T_{k-2})`, carried in
/// sign + scaled-mantissa form so magnitudes like `a0^{2N}` never leave
/// the representable range.
pub fn tridiag_det_sequence(spec: &TridiagonalSpec, upto: usize) -> Result<Vec<LogScaled>> {
    if upto < 1 || upto > spec.size {
        return Err(Error::domain(format!(
            "upto must be in 1..={}, got {upto}",
            spec.size
        )));
    }
    let beta = LogScaled::from_f64(spec.beta);
    let ag = LogScaled::from_f64(spec.alpha * spec.gamma);
    let mut dets = Vec::with_capacity(upto);
    let mut prev2 = LogScaled::from_f64(1.0); // det of the empty section
    let mut prev = beta.clone();
    dets.push(prev.clone());
    for _ in 2..=upto {
        let next = beta.mul(&prev).sub(&ag.mul(&prev2));
        prev2 = prev;
        prev = next;
        dets.push(prev.clone());
    }
    Ok(dets)
}

fn check_continuant_inputs(a0: f64, eps: f64, n: u64) -> Result<()> {
    if !a0.is_finite() || !eps.is_finite() {
        return Err(Error::domain("a0 and eps must be finite"));
    }
    if eps < 0.0 {
        return Err(Error::domain(format!("eps must be >= 0, got {eps}")));
    }
    if n < 3 {
        return Err(Error::domain(format!("continuant identity needs N >= 3, got {n}")));
    }
    Ok(())
}

/// Left side of the continuant identity:
/// `det(T_{N-1} + eps^2 I) - a0^2 det(T_{N-2} + eps^2 I)` with
/// `T` the `(-a0, a0^2 + 1, -a0)` family, evaluated through
/// [`tridiag_det_sequence`]. At `eps = 0` the result is exactly 1 whenever
/// `a0^2` and the recursion intermediates are exact in f64.
pub fn continuant_identity_lhs(a0: f64, eps: f64, n: u64) -> Result<f64> {
    check_continuant_inputs(a0, eps, n)?;
    let beta = a0 * a0 + 1.0 + eps * eps;
    let spec = TridiagonalSpec::new(-a0, beta, -a0, (n - 1) as usize)?;
    let dets = tridiag_det_sequence(&spec, (n - 1) as usize)?;
    let a2 = LogScaled::from_f64(a0 * a0);
    let lhs = dets[(n - 2) as usize].sub(&a2.mul(&dets[(n - 3) as usize]));
    let value = lhs.to_f64();
    if !value.is_finite() {
        return Err(Error::Overflow { step: (n - 1) as usize });
    }
    Ok(value)
}

/// Closed form of the same continuant,
/// `((lambda2 - 1) lambda1^N + (1 - lambda1) lambda2^N) / (lambda2 - lambda1)`,
/// evaluated in the log domain from the characteristic roots of
/// `lambda^2 - (1 + a0^2 + eps^2) lambda + a0^2`.
pub fn continuant_closed_form(a0: f64, eps: f64, n: u64) -> Result<f64> {
    check_continuant_inputs(a0, eps, n)?;
    let roots = CharRoots::from_eps(a0, eps);
    if roots.diff == 0.0 {
        return Err(Error::domain(
            "closed form undefined at a repeated characteristic root (|a0| = 1, eps = 0)",
        ));
    }
    let nf = n as f64;
    let ln_lam2 = roots.ln_lambda2();
    let ln_lam1 = 2.0 * a0.abs().ln() - ln_lam2;
    let ln_num = log_sum_exp(
        roots.lambda2_minus_one.ln() + nf * ln_lam1,
        roots.one_minus_lambda1.ln() + nf * ln_lam2,
    );
    let value = (ln_num - roots.diff.ln()).exp();
    if !value.is_finite() {
        return Err(Error::Overflow { step: n as usize });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256PlusPlus;
    use nalgebra::DMatrix;

    fn dense_det(spec: &TridiagonalSpec, n: usize) -> f64 {
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                spec.beta
            } else if i == j + 1 {
                spec.alpha
            } else if j == i + 1 {
                spec.gamma
            } else {
                0.0
            }
        });
        m.lu().determinant()
    }

    #[test]
    fn first_two_determinants_are_exact() {
        for a0 in [0.5f64, 1.5] {
            let beta = a0 * a0 + 1.0;
            let spec = TridiagonalSpec::new(-a0, beta, -a0, 4).unwrap();
            let dets = tridiag_det_sequence(&spec, 2).unwrap();
            assert_eq!(dets[0].to_f64(), beta);
            // (a0^2+1)^2 - a0^2 = a0^4 + a0^2 + 1; exact for these a0.
            assert_eq!(dets[1].to_f64(), a0.powi(4) + a0 * a0 + 1.0);
        }
    }

    #[test]
    fn matches_dense_lu_for_random_bands() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(0x7a1d14);
        for size in 1..=12usize {
            // Diagonally dominant draws keep every section well conditioned.
            let alpha = -(0.5 + rng.next_f64());
            let gamma = -(0.5 + rng.next_f64());
            let beta = 3.2 + rng.next_f64();
            let spec = TridiagonalSpec::new(alpha, beta, gamma, size).unwrap();
            let dets = tridiag_det_sequence(&spec, size).unwrap();
            for n in 1..=size {
                let reference = dense_det(&spec, n);
                let got = dets[n - 1].to_f64();
                assert!(
                    (got - reference).abs() <= 1e-10 * reference.abs(),
                    "size {n}: {got} vs {reference}"
                );
            }
        }
    }

    #[test]
    fn sequence_input_validation() {
        assert!(TridiagonalSpec::new(1.0, f64::NAN, 1.0, 3).is_err());
        assert!(TridiagonalSpec::new(1.0, 2.0, 1.0, 0).is_err());
        let spec = TridiagonalSpec::new(1.0, 2.0, 1.0, 3).unwrap();
        assert!(tridiag_det_sequence(&spec, 0).is_err());
        assert!(tridiag_det_sequence(&spec, 4).is_err());
        assert_eq!(tridiag_det_sequence(&spec, 1).unwrap().len(), 1);
    }

    #[test]
    fn continuant_is_exactly_one_at_eps_zero() {
        for a0 in [1.5f64, 2.0] {
            for n in 3..=10u64 {
                assert_eq!(continuant_identity_lhs(a0, 0.0, n).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn recursion_matches_closed_form() {
        let lhs = continuant_identity_lhs(1.1, 0.5, 8).unwrap();
        let closed = continuant_closed_form(1.1, 0.5, 8).unwrap();
        assert!((lhs - closed).abs() <= 1e-10 * closed.abs(), "{lhs} vs {closed}");

        let lhs = continuant_identity_lhs(2.0, 1.0, 40).unwrap();
        let closed = continuant_closed_form(2.0, 1.0, 40).unwrap();
        assert!((lhs - closed).abs() <= 1e-8 * closed.abs(), "{lhs} vs {closed}");
    }

    #[test]
    fn closed_form_works_in_the_stable_regime() {
        let lhs = continuant_identity_lhs(0.7, 0.3, 12).unwrap();
        let closed = continuant_closed_form(0.7, 0.3, 12).unwrap();
        assert!((lhs - closed).abs() <= 1e-12 * closed.abs());
    }

    #[test]
    fn continuant_input_validation() {
        assert!(continuant_identity_lhs(1.5, 0.5, 2).is_err());
        assert!(continuant_identity_lhs(1.5, -0.5, 8).is_err());
        assert!(continuant_closed_form(1.0, 0.0, 5).is_err());
        assert!(matches!(
            continuant_identity_lhs(2.0, 5.0, 2000),
            Err(Error::Overflow { .. })
        ));
        assert!(matches!(
            continuant_closed_form(2.0, 5.0, 2000),
            Err(Error::Overflow { .. })
        ));
    }
}
