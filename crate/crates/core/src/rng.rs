//! Deterministic random streams.
//!
//! Two kinds of randomness are used:
//!
//! * **Stateless mixing** for the scenery: a site value is a pure function of
//!   `(seed, coordinates)`. Each coordinate is zig-zag encoded to `u64` and
//!   folded into a running 64-bit state with the SplitMix64 finalizer:
//!
//!   ```text
//!   h = mix64(seed ^ 0x9E3779B97F4A7C15)
//!   for (j, w) in words: h = mix64(h ^ mix64(w + (j + 1) * 0x9E3779B97F4A7C15))
//!   ```
//!
//!   where `mix64` is the SplitMix64 output function (shifts 30/27/31,
//!   multipliers `0xBF58476D1CE4E5B9`, `0x94D049BB133111EB`). All arithmetic
//!   wraps modulo 2^64.
//!
//! * **Substreams** for walk sampling: a Xoshiro256++ generator seeded from
//!   `mix_words(master, [tag, a, b])`. Every Monte Carlo sample owns its
//!   substream, so results do not depend on scheduling.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Tags separating independent families of substreams under one master seed.
pub mod tag {
    pub const QUENCHED_WALK: u64 = 0x5157_414c_4b00_0001;
    pub const GAMMA: u64 = 0x4741_4d4d_4100_0002;
    pub const REPLICA: u64 = 0x5245_504c_4900_0003;
    pub const GROWTH: u64 = 0x4752_4f57_5400_0004;
    pub const LOCALTIME_MC: u64 = 0x4c4f_4341_4c00_0005;
    pub const PLANAR_PATH: u64 = 0x504c_414e_4100_0006;
    pub const SCENERY_SEED: u64 = 0x5343_454e_4500_0007;
    pub const SELF_TEST: u64 = 0x5345_4c46_5400_0008;
}

/// SplitMix64 output function.
#[inline(always)]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Zig-zag encoding: 0, -1, 1, -2, 2, ... -> 0, 1, 2, 3, 4, ...
#[inline(always)]
pub fn zigzag(x: i64) -> u64 {
    ((x << 1) ^ (x >> 63)) as u64
}

#[inline(always)]
fn fold(h: u64, j: usize, w: u64) -> u64 {
    mix64(h ^ mix64(w.wrapping_add((j as u64 + 1).wrapping_mul(GOLDEN))))
}

/// Mixes a seed and a word sequence into one 64-bit value.
#[inline]
pub fn mix_words(seed: u64, words: &[u64]) -> u64 {
    let mut h = mix64(seed ^ GOLDEN);
    for (j, &w) in words.iter().enumerate() {
        h = fold(h, j, w);
    }
    h
}

/// Hash of a seed and zig-zag encoded signed coordinates: one SplitMix64
/// finalizer per coordinate, chained. Cheaper than [`mix_words`]; used on the
/// scenery hot path.
#[inline(always)]
pub fn mix_coords(seed: u64, coords: &[i64]) -> u64 {
    let mut h = mix64(seed ^ GOLDEN);
    for &c in coords {
        h = mix64(h ^ zigzag(c).wrapping_mul(GOLDEN));
    }
    h
}

/// Uniform on the symmetric grid `{(j + 1/2) 2^-52}`, strictly inside (0, 1).
#[inline(always)]
pub fn open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Uniform on `[0, 1)` with 53 bits of resolution.
#[inline(always)]
pub fn half_open_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Box-Muller (cosine branch) from two words: `sqrt(-2 ln u1) cos(2 pi u2)`
/// with `u1 = open_unit(w1)`, `u2 = open_unit(w2)`.
#[inline]
pub fn normal_from_words(w1: u64, w2: u64) -> f64 {
    let u1 = open_unit(w1);
    let u2 = open_unit(w2);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Per-sample random substream.
#[derive(Clone, Debug)]
pub struct Stream {
    rng: Xoshiro256PlusPlus,
    // Buffered word for small-alphabet draws.
    pool: u64,
    pool_left: u32,
}

/// Number of small-alphabet draws extracted from one 64-bit word. For an
/// alphabet of size k the per-draw bias is at most k * 2^-(64 - 8 log2 k).
pub const DRAWS_PER_WORD: u32 = 8;

impl Stream {
    pub fn new(master: u64, tag: u64, a: u64, b: u64) -> Self {
        Self::from_seed(mix_words(master, &[tag, a, b]))
    }

    pub fn from_seed(seed: u64) -> Self {
        Stream {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            pool: 0,
            pool_left: 0,
        }
    }

    #[inline(always)]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    #[inline(always)]
    pub fn uniform(&mut self) -> f64 {
        half_open_unit(self.next_u64())
    }

    #[inline(always)]
    pub fn open_uniform(&mut self) -> f64 {
        open_unit(self.next_u64())
    }

    /// Index in `0..k` for small `k` (at most 2^16), by multiply-extract from a
    /// buffered word. Exact when `k` is a power of two.
    #[inline(always)]
    pub fn small_index(&mut self, k: u32) -> u32 {
        if self.pool_left == 0 {
            self.pool = self.rng.next_u64();
            self.pool_left = DRAWS_PER_WORD;
        }
        self.pool_left -= 1;
        let wide = self.pool as u128 * k as u128;
        self.pool = wide as u64;
        (wide >> 64) as u32
    }

    pub fn standard_normal(&mut self) -> f64 {
        let w1 = self.next_u64();
        let w2 = self.next_u64();
        normal_from_words(w1, w2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zigzag_orders_small_integers() {
        let got: Vec<u64> = [0i64, -1, 1, -2, 2].iter().map(|&x| zigzag(x)).collect();
        assert_eq!(got, vec![0, 1, 2, 3, 4]);
        assert_eq!(zigzag(i64::MIN), u64::MAX);
    }

    #[test]
    fn mixing_is_order_sensitive() {
        assert_ne!(mix_coords(1, &[1, 2]), mix_coords(1, &[2, 1]));
        assert_ne!(mix_coords(1, &[0]), mix_coords(1, &[0, 0]));
        assert_eq!(mix_coords(9, &[-3, 4]), mix_coords(9, &[-3, 4]));
    }

    #[test]
    fn unit_conversions_stay_in_range() {
        assert!(open_unit(0) > 0.0);
        assert!(open_unit(u64::MAX) < 1.0);
        assert_eq!(half_open_unit(0), 0.0);
        assert!(half_open_unit(u64::MAX) < 1.0);
    }

    #[test]
    fn power_of_two_indices_are_uniform_bits() {
        let mut s = Stream::from_seed(3);
        let mut counts = [0u32; 4];
        for _ in 0..40_000 {
            counts[s.small_index(4) as usize] += 1;
        }
        for c in counts {
            assert!((c as f64 - 10_000.0).abs() < 4.0 * 86.6, "{counts:?}");
        }
    }

    #[test]
    fn substreams_are_reproducible() {
        let mut a = Stream::new(5, tag::GAMMA, 1, 2);
        let mut b = Stream::new(5, tag::GAMMA, 1, 2);
        let mut c = Stream::new(5, tag::GAMMA, 1, 3);
        let xa: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        let xc: Vec<u64> = (0..8).map(|_| c.next_u64()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }
}
