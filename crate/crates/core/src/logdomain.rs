//! Log-domain evaluation helpers.
//!
//! Two tools live here. [`log_sum_exp`] combines log-magnitude terms without
//! overflow. [`LogScaled`] is a sign + scaled-magnitude representation
//! (mantissa in [1, 2) with a separate binary exponent) used for determinant
//! recursions whose values grow like `lambda^N`: arithmetic on it performs
//! exactly one f64 rounding per operation, so results match plain f64
//! bit-for-bit whenever the value stays in range, while exponents far beyond
//! f64 range stay exact.

/// log(exp(a) + exp(b)) without overflow; handles -inf identities.
#[inline]
pub fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// 2^e as f64 for e in [-1022, 1023].
#[inline]
fn exp2i(e: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((e + 1023) as u64) << 52)
}

/// Decompose finite x > 0 into (m, e) with x = m * 2^e and m in [1, 2).
fn split(x: f64) -> (f64, i64) {
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7FF) as i64;
    if raw == 0 {
        // Subnormal: renormalize through an exact scale-up.
        let (m, e) = split(x * exp2i(64) * exp2i(64));
        (m, e - 128)
    } else {
        let m = f64::from_bits((bits & !(0x7FFu64 << 52)) | (1023u64 << 52));
        (m, raw - 1023)
    }
}

/// Sign and scaled magnitude: value = sign * mant * 2^exp2, mant in [1, 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScaled {
    sign: i8,
    mant: f64,
    exp2: i64,
}

impl LogScaled {
    pub const ZERO: LogScaled = LogScaled { sign: 0, mant: 0.0, exp2: 0 };

    pub fn from_f64(x: f64) -> LogScaled {
        assert!(x.is_finite(), "LogScaled::from_f64 needs a finite input");
        if x == 0.0 {
            return LogScaled::ZERO;
        }
        let (mant, exp2) = split(x.abs());
        LogScaled { sign: if x > 0.0 { 1 } else { -1 }, mant, exp2 }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// -1, 0, or 1.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of |value|; -inf for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.mant.ln() + self.exp2 as f64 * std::f64::consts::LN_2
        }
    }

    /// Back to f64, saturating to +-inf / 0 outside the representable range.
    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let s = self.sign as f64;
        match self.exp2 {
            e if e > 1023 => s * f64::INFINITY,
            // 2^-1074 is the smallest subnormal; below that, flush to zero.
            e if e < -1074 => s * 0.0,
            e if e >= -1022 => s * self.mant * exp2i(e),
            // Subnormal landing zone: split the scale so each step is exact.
            e => s * self.mant * exp2i(-1022) * exp2i(e + 1022),
        }
    }

    pub fn neg(&self) -> LogScaled {
        LogScaled { sign: -self.sign, ..*self }
    }

    pub fn mul(&self, rhs: &LogScaled) -> LogScaled {
        if self.sign == 0 || rhs.sign == 0 {
            return LogScaled::ZERO;
        }
        // One f64 rounding, same relative rounding as the in-range product.
        let p = self.mant * rhs.mant;
        let (mant, carry) = split(p);
        LogScaled {
            sign: self.sign * rhs.sign,
            mant,
            exp2: self.exp2 + rhs.exp2 + carry,
        }
    }

    pub fn add(&self, rhs: &LogScaled) -> LogScaled {
        if self.sign == 0 {
            return *rhs;
        }
        if rhs.sign == 0 {
            return *self;
        }
        let (big, small) = if self.exp2 >= rhs.exp2 { (self, rhs) } else { (rhs, self) };
        let shift = big.exp2 - small.exp2;
        // Beyond 54 bits the small term cannot move the rounded sum.
        if shift >= 55 {
            return *big;
        }
        // Exact alignment (shift <= 54 keeps the scaled mantissa normal),
        // then a single f64 add, matching plain f64 at the aligned scale.
        let aligned = small.mant * exp2i(-shift);
        let s = big.sign as f64 * big.mant + small.sign as f64 * aligned;
        if s == 0.0 {
            return LogScaled::ZERO;
        }
        let (mant, e) = split(s.abs());
        LogScaled {
            sign: if s > 0.0 { 1 } else { -1 },
            mant,
            exp2: big.exp2 + e,
        }
    }

    pub fn sub(&self, rhs: &LogScaled) -> LogScaled {
        self.add(&rhs.neg())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn log_sum_exp_basics() {
        assert_eq!(log_sum_exp(f64::NEG_INFINITY, 1.5), 1.5);
        assert_eq!(log_sum_exp(1.5, f64::NEG_INFINITY), 1.5);
        let x = log_sum_exp(0.0, 0.0);
        assert!((x - std::f64::consts::LN_2).abs() < 1e-15);
        // Magnitude-safe: exp(1000) would overflow on its own.
        let y = log_sum_exp(1000.0, 1000.0);
        assert!((y - (1000.0 + std::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn roundtrip_is_exact() {
        for &x in &[1.0, -1.5, 0.0, 3.25e-300, -7.1e288, f64::MIN_POSITIVE / 8.0] {
            assert_eq!(LogScaled::from_f64(x).to_f64().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn cancellation_yields_zero() {
        let a = LogScaled::from_f64(1.5);
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.sub(&a).to_f64(), 0.0);
    }

    #[test]
    fn huge_products_keep_exact_exponents() {
        let a = LogScaled::from_f64(1e300);
        let sq = a.mul(&a);
        assert_eq!(sq.to_f64(), f64::INFINITY);
        let expect = 2.0 * 1e300f64.ln();
        assert!((sq.ln_abs() - expect).abs() < 1e-9);
        assert_eq!(sq.sign(), 1);
        // And back down: dividing the exponent out restores range.
        let tiny = LogScaled::from_f64(1e-300);
        let one = sq.mul(&tiny).mul(&tiny);
        assert!((one.to_f64() - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn mul_matches_f64(x in -1e100f64..1e100, y in -1e100f64..1e100) {
            let got = LogScaled::from_f64(x).mul(&LogScaled::from_f64(y)).to_f64();
            prop_assert_eq!(got.to_bits(), (x * y).to_bits());
        }

        #[test]
        fn add_matches_f64(x in -1e100f64..1e100, y in -1e100f64..1e100) {
            let got = LogScaled::from_f64(x).add(&LogScaled::from_f64(y)).to_f64();
            prop_assert_eq!(got.to_bits(), (x + y).to_bits());
        }
    }
}
