//! Adaptive numerical quadrature used as an independent oracle for the
//! closed-form identities: the spectral log-integral behind
//! [`crate::linalg::szego_log_factor`] and the tail integral whose exact
//! value is [`crate::bounds::stable_variance_bound`].
//!
//! The engine is plain bisection refinement over 15-point Gauss-Legendre
//! panels. A panel is accepted when splitting it changes the estimate by
//! less than its share of the absolute tolerance budget.

use crate::bounds::CharRoots;
use crate::error::{Error, Result};

/// Positive abscissas of the 15-point Gauss-Legendre rule on [-1, 1].
const GL15_NODES: [f64; 7] = [
    0.201_194_093_997_434_51,
    0.394_151_347_077_563_4,
    0.570_972_172_608_538_8,
    0.724_417_731_360_170_1,
    0.848_206_583_410_427_2,
    0.937_273_392_400_706_0,
    0.987_992_518_020_485_4,
];

/// Weights paired with [`GL15_NODES`]; the center node 0 has its own weight.
const GL15_WEIGHTS: [f64; 7] = [
    0.198_431_485_327_111_25,
    0.186_161_000_015_561_88,
    0.166_269_205_816_993_78,
    0.139_570_677_926_153_9,
    0.107_159_220_467_171_77,
    0.070_366_047_488_108_07,
    0.030_753_241_996_118_647,
];

const GL15_CENTER_WEIGHT: f64 = 0.202_578_241_925_560_9;

/// Hard cap on processed subintervals; hitting it means the integrand is
/// too rough for the requested tolerance.
const MAX_INTERVALS: usize = 1 << 18;

fn gl15_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = GL15_CENTER_WEIGHT * f(c);
    for i in 0..7 {
        let x = h * GL15_NODES[i];
        s += GL15_WEIGHTS[i] * (f(c + x) + f(c - x));
    }
    s * h
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol` by adaptive
/// bisection of Gauss-Legendre panels.
///
/// Errors with `NumericalFailure` if the refinement budget is exhausted
/// before the tolerance is met.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::domain("integration interval must be finite and nonempty"));
    }
    if !(abs_tol > 0.0) {
        return Err(Error::domain("quadrature tolerance must be positive"));
    }
    let total_len = b - a;
    let mut stack = vec![(a, b, gl15_panel(&f, a, b))];
    let mut sum = 0.0;
    let mut comp = 0.0; // Kahan compensation for the accepted-panel sum
    let mut processed = 0usize;
    while let Some((lo, hi, whole)) = stack.pop() {
        processed += 1;
        if processed > MAX_INTERVALS {
            return Err(Error::NumericalFailure(
                "adaptive quadrature exhausted its refinement budget".into(),
            ));
        }
        let mid = 0.5 * (lo + hi);
        let left = gl15_panel(&f, lo, mid);
        let right = gl15_panel(&f, mid, hi);
        let refined = left + right;
        // Proportional error budget keeps the summed panel errors under
        // abs_tol regardless of how unevenly the refinement splits.
        let budget = abs_tol * ((hi - lo) / total_len);
        if (refined - whole).abs() <= budget || hi - lo < total_len * 1e-15 {
            let y = refined - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        } else {
            stack.push((lo, mid, left));
            stack.push((mid, hi, right));
        }
    }
    Ok(sum)
}

/// Evaluates `(1/pi) * integral over [0, pi] of ln(1 + eps^2 / q(w)) dw`
/// with `q(w) = |e^{jw} - a0|^2`, the spectral integral whose closed form
/// is `szego_log_factor`. Pure quadrature; shares no code with the closed
/// form it cross-checks.
///
/// Requires `|a0| < 1` and `eps >= 0`.
pub fn szego_quadrature(a0: f64, eps: f64) -> Result<f64> {
    if !(a0.is_finite() && a0.abs() < 1.0) {
        return Err(Error::domain("spectral integral requires |a0| < 1"));
    }
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::domain("eps must be finite and >= 0"));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    let eps2 = eps * eps;
    // q(w) = 1 - 2 a0 cos w + a0^2, written without cancellation: the
    // squared distance never dips below (1 - |a0|)^2.
    let q = move |w: f64| -> f64 {
        if a0 >= 0.0 {
            let s = (0.5 * w).sin();
            (1.0 - a0) * (1.0 - a0) + 4.0 * a0 * s * s
        } else {
            let c = (0.5 * w).cos();
            (1.0 + a0) * (1.0 + a0) + 4.0 * (-a0) * c * c
        }
    };
    let integrand = move |w: f64| (eps2 / q(w)).ln_1p();
    let val = integrate_adaptive(integrand, 0.0, std::f64::consts::PI, 1e-12)?;
    Ok(val / std::f64::consts::PI)
}

/// Evaluates `2 * integral over x in (0, inf) of lambda2(sqrt(x))^{-(N-2)/4} dx`,
/// the tail integral from the variance derivation in the stable regime.
/// Its exact value is the closed form `8/(N-6) - 8 a0^2/(N+2)`; this routine
/// recomputes it by quadrature alone for cross-checking.
///
/// Requires `|a0| < 1` and `N >= 7` (the integral diverges for N <= 6).
pub fn stable_variance_quadrature(a0: f64, n: u64) -> Result<f64> {
    if !(a0.is_finite() && a0.abs() < 1.0) {
        return Err(Error::domain("variance integral requires |a0| < 1"));
    }
    if n < 7 {
        return Err(Error::domain("variance integral diverges for N < 7"));
    }
    let p = (n as f64 - 2.0) / 4.0;
    // Substitute u = ln(1 + x): the integrand decays like e^{-(p-1)u}, so a
    // finite window keeps the dropped tail around e^{-32} of the total.
    let upper = (32.0 + (1.0 / (p - 1.0)).ln().max(0.0)) / (p - 1.0);
    let integrand = move |u: f64| {
        let x = u.exp_m1();
        let v = CharRoots::from_eps_squared(a0, x).lambda2_minus_one;
        (u - p * v.ln_1p()).exp()
    };
    // Two-phase tolerance: a coarse pass fixes the magnitude, the second
    // pass integrates to a relative 1e-9 of it.
    let coarse = integrate_adaptive(integrand, 0.0, upper, 1e-6)?;
    let tol = (1e-9 * coarse.abs()).max(1e-300);
    let fine = integrate_adaptive(integrand, 0.0, upper, tol)?;
    Ok(2.0 * fine)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact_on_a_single_panel() {
        let v = integrate_adaptive(|x| x * x, 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sine_integral() {
        let v = integrate_adaptive(f64::sin, 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn resolves_a_narrow_peak() {
        // integral of 1/(d^2 + x^2) over [-1, 1] = 2 atan(1/d)/d
        let d = 1e-2;
        let v = integrate_adaptive(|x| 1.0 / (d * d + x * x), -1.0, 1.0, 1e-9).unwrap();
        let exact = 2.0 * (1.0 / d).atan() / d;
        assert!((v - exact).abs() / exact < 1e-10, "v={v} exact={exact}");
    }

    #[test]
    fn rejects_bad_interval_and_tolerance() {
        assert!(integrate_adaptive(|x| x, 1.0, 0.0, 1e-9).is_err());
        assert!(integrate_adaptive(|x| x, 0.0, 1.0, 0.0).is_err());
        assert!(integrate_adaptive(|x| x, 0.0, f64::INFINITY, 1e-9).is_err());
    }

    #[test]
    fn spectral_integral_matches_pinned_value() {
        // independently pinned with 60-digit arithmetic
        let v = szego_quadrature(0.8, 0.5).unwrap();
        assert!((v - 0.370_194_277_550_391_15).abs() < 1e-11, "v={v}");
    }

    #[test]
    fn spectral_integral_at_a0_zero_is_ln1p_eps2() {
        for eps in [0.01, 0.3, 1.0, 5.0] {
            let v = szego_quadrature(0.0, eps).unwrap();
            let exact = (eps * eps).ln_1p();
            assert!((v - exact).abs() < 1e-12, "eps={eps}: {v} vs {exact}");
        }
    }

    #[test]
    fn spectral_integral_vanishes_at_eps_zero() {
        assert_eq!(szego_quadrature(0.9, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn spectral_integral_domain_errors() {
        assert!(szego_quadrature(1.0, 0.5).is_err());
        assert!(szego_quadrature(-1.2, 0.5).is_err());
        assert!(szego_quadrature(0.5, -0.1).is_err());
    }

    #[test]
    fn variance_integral_matches_closed_form_values() {
        // (0.5, 10): closed form 8/4 - 2/12 = 11/6, pinned independently
        let v = stable_variance_quadrature(0.5, 10).unwrap();
        assert!((v - 11.0 / 6.0).abs() / (11.0 / 6.0) < 1e-9, "v={v}");
        // (0, 7): 8/1 - 0 = 8
        let v = stable_variance_quadrature(0.0, 7).unwrap();
        assert!((v - 8.0).abs() / 8.0 < 1e-9, "v={v}");
        // large-N, strong correlation
        let v = stable_variance_quadrature(0.9, 500).unwrap();
        let exact = 8.0 / 494.0 - 8.0 * 0.81 / 502.0;
        assert!((v - exact).abs() / exact < 1e-6, "v={v} exact={exact}");
    }

    #[test]
    fn variance_integral_domain_errors() {
        assert!(stable_variance_quadrature(1.1, 10).is_err());
        assert!(stable_variance_quadrature(0.5, 6).is_err());
    }
}
