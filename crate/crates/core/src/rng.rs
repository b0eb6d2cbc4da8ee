//! Seedable pseudorandom generator with a fully specified algorithm.
//!
//! State initialization: the 64-bit seed is passed once through SplitMix64
//! (`z = seed + 0x9E3779B97F4A7C15; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z ^= z >> 31`), and a zero result
//! is replaced by `0x9E3779B97F4A7C15`.
//!
//! Output: xorshift64* with shifts (12, 25, 27) and multiplier
//! `0x2545F4914F6CDD1D`, all arithmetic wrapping mod 2^64. Uniform reals take
//! the top 53 bits: `(x >> 11) * 2^-53`, so they lie in `[0, 1)`.
//!
//! Any port that follows these steps reproduces the same stream bit for bit.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let mut z = seed.wrapping_add(GOLDEN_GAMMA);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        let state = if z == 0 { GOLDEN_GAMMA } else { z };
        Self { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform real in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
