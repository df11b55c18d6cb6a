//! Symmetric discrete power-law increments.
//!
//! `P(X = +-k e_i) = k^-(1+alpha) / (2 d zeta(1+alpha))` for `k >= 1` and each
//! axis `i`. The magnitude is drawn from an alias table over `1..=HEAD_CAP`
//! plus one lump carrying the exact tail mass `P(|X| > HEAD_CAP)`. A lump draw
//! is resolved by rejection from a discretized Pareto envelope, so the law is
//! not truncated. Magnitudes of at least [`JUMP_CAP`] are returned as
//! `JUMP_CAP`, which keeps positions inside `i64` for horizons up to 2^22.

use crate::rng::Stream;

/// Largest magnitude tabulated exactly.
pub const HEAD_CAP: u64 = 4096;

/// Magnitude clamp (2^40). For `alpha = 0.8` a clamped draw has probability
/// about 2e-7 per step.
pub const JUMP_CAP: u64 = 1 << 40;

/// `sum_{k >= n} k^-s` for `s > 1`, `n >= 1`. Direct summation below 64,
/// Euler-Maclaurin with three Bernoulli corrections from there on.
pub fn power_tail_sum(n: u64, s: f64) -> f64 {
    assert!(s > 1.0 && n >= 1);
    const SWITCH: u64 = 64;
    let mut head = 0.0;
    let mut k = n;
    while k < SWITCH {
        head += (k as f64).powf(-s);
        k += 1;
    }
    let x = k as f64;
    // B2 = 1/6, B4 = -1/30, B6 = 1/42
    let t1 = s / 12.0 * x.powf(-s - 1.0);
    let t2 = -s * (s + 1.0) * (s + 2.0) / 720.0 * x.powf(-s - 3.0);
    let t3 = s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) / 30240.0 * x.powf(-s - 5.0);
    head + x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s) + t1 + t2 + t3
}

/// Walker alias table.
#[derive(Clone, Debug)]
pub struct AliasTable {
    /// `(acceptance threshold as a 64-bit fraction, alias)` per column.
    cells: Vec<(u64, u32)>,
    prob: Vec<f64>,
}

impl AliasTable {
    /// Builds from non-negative weights (normalized internally).
    pub fn new(weights: &[f64]) -> Self {
        let n = weights.len();
        assert!(n > 0 && n < u32::MAX as usize);
        let total: f64 = weights.iter().sum();
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut prob = vec![1.0; n];
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) =
            (0..n).partition(|&i| scaled[i] < 1.0);
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            prob[s] = scaled[s];
            alias[s] = l as u32;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in small.into_iter().chain(large) {
            prob[i] = 1.0;
        }
        let cells = prob
            .iter()
            .zip(&alias)
            .map(|(&p, &a)| {
                (
                    if p >= 1.0 {
                        u64::MAX
                    } else {
                        (p * 2f64.powi(64)) as u64
                    },
                    a,
                )
            })
            .collect();
        AliasTable { cells, prob }
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    #[inline(always)]
    pub fn sample(&self, rng: &mut Stream) -> usize {
        // High word picks the column, low word is a uniform fraction within it.
        let wide = rng.next_u64() as u128 * self.cells.len() as u128;
        let i = (wide >> 64) as usize;
        let (threshold, alias) = self.cells[i];
        if (wide as u64) < threshold {
            i
        } else {
            alias as usize
        }
    }

    /// Probability of outcome `i` implied by the table.
    pub fn implied_probability(&self, i: usize) -> f64 {
        let n = self.prob.len() as f64;
        let mut p = self.prob[i] / n;
        for (j, &(_, a)) in self.cells.iter().enumerate() {
            if a as usize == i && j != i {
                p += (1.0 - self.prob[j]) / n;
            }
        }
        p
    }
}

/// Prepared sampler for the power-law magnitude `|X|`.
#[derive(Clone, Debug)]
pub struct PowerLawMagnitude {
    alpha: f64,
    exponent: f64,
    zeta: f64,
    table: AliasTable,
    tail_bound: f64,
}

impl PowerLawMagnitude {
    pub fn new(alpha: f64) -> Self {
        let s = 1.0 + alpha;
        let mut weights: Vec<f64> = (1..=HEAD_CAP).map(|k| (k as f64).powf(-s)).collect();
        let tail = power_tail_sum(HEAD_CAP + 1, s);
        let head: f64 = weights.iter().rev().sum();
        weights.push(tail);
        let k1 = (HEAD_CAP + 1) as f64;
        PowerLawMagnitude {
            alpha,
            exponent: s,
            zeta: head + tail,
            table: AliasTable::new(&weights),
            tail_bound: (1.0 + 1.0 / k1).powf(s) / alpha,
        }
    }

    /// Normalizing constant `zeta(1 + alpha)`.
    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Exact `P(|X| = k)`.
    pub fn pmf(&self, k: u64) -> f64 {
        if k == 0 {
            0.0
        } else {
            (k as f64).powf(-self.exponent) / self.zeta
        }
    }

    /// Exact `P(|X| > t)`.
    pub fn tail(&self, t: u64) -> f64 {
        power_tail_sum(t + 1, self.exponent) / self.zeta
    }

    #[inline]
    pub fn sample(&self, rng: &mut Stream) -> u64 {
        let idx = self.table.sample(rng);
        if (idx as u64) < HEAD_CAP {
            idx as u64 + 1
        } else {
            self.sample_tail(rng)
        }
    }

    #[cold]
    fn sample_tail(&self, rng: &mut Stream) -> u64 {
        let k1 = (HEAD_CAP + 1) as f64;
        loop {
            let y = k1 * rng.open_uniform().powf(-1.0 / self.alpha);
            if y >= JUMP_CAP as f64 {
                return JUMP_CAP;
            }
            let k = y.floor();
            // P(floor(Y) = k) is proportional to k^-a - (k+1)^-a.
            let envelope = k.powf(-self.alpha) * -(-self.alpha * (1.0 / k).ln_1p()).exp_m1();
            let ratio = k.powf(-self.exponent) / envelope;
            if rng.uniform() * self.tail_bound <= ratio {
                return k as u64;
            }
        }
    }
}
