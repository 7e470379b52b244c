//! Pinned random number generation.
//!
//! Reproducibility contract: every stochastic result in this crate is a pure
//! function of a `u64` seed. The generator is xoshiro256++ seeded through
//! SplitMix64, uniforms are the top 53 bits of each output, and Gaussian
//! variates come from the polar Box-Muller transform with a cached spare.
//! All of these are fixed algorithms, so a given seed reproduces the same
//! stream on any platform up to the rounding of the platform's `ln`/`sqrt`
//! (identical in practice on IEEE-754 systems with a correctly rounded
//! libm; always identical across reruns on one platform).

/// Output of the SplitMix64 stream seeded at `state`, index 0.
#[inline]
fn splitmix64(state: u64) -> u64 {
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The `(index + 1)`-th output of the SplitMix64 stream seeded with `base`.
///
/// Used to derive independent per-run seeds: random access into the stream
/// means a worker pool can claim any run index without replaying the stream,
/// so results never depend on how runs are scheduled.
#[inline]
pub fn mix_seed(base: u64, index: u64) -> u64 {
    splitmix64(base.wrapping_add(index.wrapping_add(1).wrapping_mul(SPLITMIX_GAMMA)))
}

/// xoshiro256++ (Blackman-Vigna), state seeded by four SplitMix64 outputs.
#[derive(Debug, Clone)]
pub struct Xoshiro256PlusPlus {
    s: [u64; 4],
}

impl Xoshiro256PlusPlus {
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut s = [0u64; 4];
        for (i, slot) in s.iter_mut().enumerate() {
            *slot = mix_seed(seed, i as u64);
        }
        Xoshiro256PlusPlus { s }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Standard Gaussian variates via the polar Box-Muller method.
#[derive(Debug, Clone)]
pub struct GaussianSource {
    rng: Xoshiro256PlusPlus,
    spare: Option<f64>,
}

impl GaussianSource {
    pub fn seed_from_u64(seed: u64) -> Self {
        GaussianSource {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            spare: None,
        }
    }

    /// One N(0, 1) draw.
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(g) = self.spare.take() {
            return g;
        }
        loop {
            let u = 2.0 * self.rng.next_f64() - 1.0;
            let v = 2.0 * self.rng.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let scale = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * scale);
                return u * scale;
            }
        }
    }
}
