//! Seedable, portable random number generator for the synthetic data paths.
//!
//! Everything downstream of a `--seed` flag must be reproducible bit-for-bit,
//! including across language ports of the generator, so the algorithm is
//! pinned here rather than delegated to a library whose stream may change
//! between versions.
//!
//! State expansion uses SplitMix64: repeatedly add the increment
//! `0x9E3779B97F4A7C15` to a 64-bit state `s` and output
//! `mix(s)` where `mix(z)` is
//!
//! ```text
//! z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//! z ^= z >> 27; z *= 0x94D049BB133111EB;
//! z ^= z >> 31;
//! ```
//!
//! The stream itself is xoshiro256++ over four 64-bit words `s0..s3`:
//!
//! ```text
//! out = rotl(s0 + s3, 23) + s0
//! t = s1 << 17
//! s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t
//! s3 = rotl(s3, 45)
//! ```
//!
//! Uniform doubles take the top 53 bits: `(out >> 11) * 2^-53`, giving a
//! value in `[0, 1)`. Normal deviates use the Box-Muller transform
//! `sqrt(-2 ln u1) * cos(2*pi*u2)` with `u1` forced away from zero.

const SPLITMIX_INC: u64 = 0x9E3779B97F4A7C15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(SPLITMIX_INC);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// xoshiro256++ stream with SplitMix64 seeding.
#[derive(Debug, Clone)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self::from_seed_stream(seed, 0)
    }

    /// Independent stream `k` of the same seed. Stream separation comes from
    /// perturbing the SplitMix64 state with `(k + 1) * SPLITMIX_INC` before
    /// expansion, so samples rendered concurrently each own a stream that
    /// depends only on `(seed, k)`.
    pub fn from_seed_stream(seed: u64, stream: u64) -> Self {
        let mut st = seed ^ (stream.wrapping_add(1)).wrapping_mul(SPLITMIX_INC);
        let mut s = [0u64; 4];
        for w in &mut s {
            *w = splitmix64(&mut st);
        }
        if s == [0, 0, 0, 0] {
            s[0] = SPLITMIX_INC;
        }
        Self { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let out = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        out
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal deviate via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform().max(f64::MIN_POSITIVE);
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform integer in `[0, n)`, by rejection to avoid modulo bias.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % n) as usize;
            }
        }
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}
