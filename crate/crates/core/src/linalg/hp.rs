//! Thin fixed-precision wrapper over `astro_float::BigFloat`.
//!
//! The determinant oracle factors dense covariance Grams whose entries span
//! ~`|a0|^{2N}` dynamic range with O(1) pivots, so every intermediate is
//! kept at 256 bits; rounding the entries themselves to f64 already makes
//! the worst acceptance-grid matrices numerically singular. 256 bits keeps
//! the factorization error around 1e-40 at `a0 = 2, N = 60`, leaving the
//! final f64 `ln` of each pivot as the only meaningful rounding step.

use astro_float::{BigFloat, RoundingMode, Word};

const PREC: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Clone, Debug)]
pub(crate) struct Hp(BigFloat);

impl Hp {
    pub fn from_f64(x: f64) -> Self {
        debug_assert!(x.is_finite());
        if x != 0.0 && x.abs() < f64::MIN_POSITIVE {
            // The backend converts subnormal inputs at half their value
            // (astro-float 0.9). Lift by an exact power of two into normal
            // range, convert, and scale back down exactly.
            let lift = 2f64.powi(537);
            let lifted = BigFloat::from_f64(x * lift * lift, PREC);
            let down = BigFloat::from_f64(lift, PREC);
            return Hp(lifted.div(&down, PREC, RM).div(&down, PREC, RM));
        }
        Hp(BigFloat::from_f64(x, PREC))
    }

    pub fn one() -> Self {
        Self::from_f64(1.0)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Hp(self.0.add(&rhs.0, PREC, RM))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Hp(self.0.sub(&rhs.0, PREC, RM))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Hp(self.0.mul(&rhs.0, PREC, RM))
    }

    pub fn div(&self, rhs: &Self) -> Self {
        Hp(self.0.div(&rhs.0, PREC, RM))
    }

    /// Round to the nearest f64. Saturates to `±INFINITY`/`±0.0` outside the
    /// representable range; inputs that far out only arise after an overflow
    /// upstream has already been caught.
    pub fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_zero() {
            return 0.0;
        }
        let neg = self.0.is_negative();
        if self.0.is_inf() {
            return if neg { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        let Some((words, _prec, _sign, exp, _inexact)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        // Mantissa is little-endian with the MSB of the top word set; the
        // value is (fraction in [0.5, 1)) * 2^exp. The top two words carry
        // 128 mantissa bits, far more than f64 needs.
        let wb = (core::mem::size_of::<Word>() * 8) as i32;
        let n = words.len();
        let mut frac = words[n - 1] as f64 / 2f64.powi(wb);
        if n >= 2 {
            frac += words[n - 2] as f64 / 2f64.powi(2 * wb);
        }
        let mag = scale_exp2(frac, exp as i64);
        if neg {
            -mag
        } else {
            mag
        }
    }

    pub fn is_strictly_positive(&self) -> bool {
        !self.0.is_nan() && !self.0.is_zero() && !self.0.is_negative()
    }
}

/// `frac * 2^e` with the exponent applied in two halves so the intermediate
/// powers of two stay representable for any i64 exponent.
fn scale_exp2(frac: f64, e: i64) -> f64 {
    if e > 1100 {
        return f64::INFINITY;
    }
    if e < -1150 {
        return 0.0;
    }
    let e1 = (e / 2) as i32;
    let e2 = (e - i64::from(e1)) as i32;
    frac * 2f64.powi(e1) * 2f64.powi(e2)
}
