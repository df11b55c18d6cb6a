//! Expected local times of renewal walks.
//!
//! For a renewal law with finite support, `E N_n(i) = P(T_i <= n)` where `T_i`
//! is the step at which site `i` is hit. With `u_i = P(i in S)` (the renewal
//! mass, `u_0 = 1`, `u_i = sum_r p_r u_{i-r}`) and
//! `v_i = P(i is hit at a step >= n)`, which solves the same recursion driven
//! by the law of `S_n`,
//!
//! ```text
//! E N_n(i) = u_i - v_i + P(S_n = i).
//! ```
//!
//! For `i < n * min(support)` this reduces to `u_i`. The law of `S_n` is built
//! by repeated squaring with FFT convolutions.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::occupation::ExpectedLocalTimeTable;
use crate::rng::{tag, Stream};
use crate::walks::IncrementLaw;

/// Largest table (number of sites) built exactly by default.
pub const DEFAULT_TABLE_BUDGET: u64 = 50_000_000;

fn renewal_parts(law: &IncrementLaw) -> Result<(&[i64], &[f64])> {
    match law {
        IncrementLaw::RenewalFinite { support, probs } => {
            let bad = law.validate();
            if bad
                .iter()
                .any(|v| v.hypothesis == crate::walks::Hypothesis::WellFormed)
                || support.iter().any(|&s| s < 1)
            {
                return Err(Error::domain(format!("malformed renewal law: {bad:?}")));
            }
            Ok((support, probs))
        }
        _ => Err(Error::domain(
            "expected local times are tabulated for renewal laws only",
        )),
    }
}

/// `u_0..=u_len`, `u_i = P(i in {S_0, S_1, ...})`.
pub fn renewal_mass(law: &IncrementLaw, len: usize) -> Result<Vec<f64>> {
    let (support, probs) = renewal_parts(law)?;
    let mut u = vec![0.0; len + 1];
    u[0] = 1.0;
    for i in 1..=len {
        let mut acc = 0.0;
        for (&s, &p) in support.iter().zip(probs) {
            if s as usize <= i {
                acc += p * u[i - s as usize];
            }
        }
        u[i] = acc;
    }
    Ok(u)
}

/// Linear convolution; FFT above a small size, negatives clipped to zero.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= 32 {
        let mut out = vec![0.0; len];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        return out;
    }
    let size = len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let pad = |v: &[f64]| {
        let mut c: Vec<Complex<f64>> = v.iter().map(|&x| Complex::new(x, 0.0)).collect();
        c.resize(size, Complex::new(0.0, 0.0));
        c
    };
    let mut fa = pad(a);
    let mut fb = pad(b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / size as f64;
    fa[..len].iter().map(|c| (c.re * scale).max(0.0)).collect()
}

/// Law of `S_n` as `(offset, pmf)` with `pmf[j] = P(S_n = offset + j)`.
pub fn sum_pmf(law: &IncrementLaw, n: u64) -> Result<(i64, Vec<f64>)> {
    let (support, probs) = renewal_parts(law)?;
    let lo = *support.iter().min().unwrap();
    let hi = *support.iter().max().unwrap();
    let mut base = vec![0.0; (hi - lo) as usize + 1];
    for (&s, &p) in support.iter().zip(probs) {
        base[(s - lo) as usize] += p;
    }
    let mut result = vec![1.0];
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = normalized(convolve(&result, &base));
        }
        e >>= 1;
        if e > 0 {
            base = normalized(convolve(&base, &base));
        }
    }
    Ok((lo * n as i64, result))
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

/// Exact `E N_n(i)` for `1 <= i <= n * max(support)`.
pub fn expected_localtime_renewal(
    law: &IncrementLaw,
    n: u64,
    budget: u64,
) -> Result<ExpectedLocalTimeTable> {
    let (support, probs) = renewal_parts(law)?;
    if n == 0 {
        return Err(Error::usage("horizon must be at least 1"));
    }
    let hi = *support.iter().max().unwrap() as u64;
    let len = n.checked_mul(hi).filter(|&l| l <= budget).ok_or_else(|| {
        Error::resource(
            format!("expected local-time table needs {n} x {hi} sites, budget is {budget}"),
            "set experiment.expected_localtime = \"monte_carlo\" to estimate the table from an independent sample",
        )
    })? as usize;
    let u = renewal_mass(law, len)?;
    let (offset, pmf) = sum_pmf(law, n)?;
    let p_at = |i: usize| -> f64 {
        let j = i as i64 - offset;
        if j >= 0 && (j as usize) < pmf.len() {
            pmf[j as usize]
        } else {
            0.0
        }
    };
    let mut v = vec![0.0; len + 1];
    let start = offset.max(0) as usize;
    for i in start..=len {
        let mut acc = p_at(i);
        for (&s, &p) in support.iter().zip(probs) {
            if s as usize <= i {
                acc += p * v[i - s as usize];
            }
        }
        v[i] = acc;
    }
    let values = (1..=len)
        .map(|i| (u[i] - v[i] + p_at(i)).clamp(0.0, 1.0))
        .collect();
    Ok(ExpectedLocalTimeTable { horizon: n, values })
}

/// Visit frequencies over `samples` independent paths (stream tag separate
/// from every experiment tag, so the estimate never reuses test samples).
pub fn expected_localtime_monte_carlo(
    law: &IncrementLaw,
    n: u64,
    samples: u64,
    seed: u64,
) -> Result<ExpectedLocalTimeTable> {
    let (support, _) = renewal_parts(law)?;
    if samples == 0 || n == 0 {
        return Err(Error::usage("need at least one sample and horizon >= 1"));
    }
    let len = (n * *support.iter().max().unwrap() as u64) as usize;
    let sampler = Arc::new(law.sampler()?);
    let chunks: Vec<Vec<u32>> = (0..samples)
        .collect::<Vec<_>>()
        .par_chunks(256)
        .map(|idx| {
            let mut hits = vec![0u32; len];
            for &i in idx {
                let mut rng = Stream::new(seed, tag::LOCALTIME_MC, i, 0);
                for s in sampler.positions(&mut rng).take(n as usize) {
                    hits[s.0[0] as usize - 1] += 1;
                }
            }
            hits
        })
        .collect();
    let mut total = vec![0u64; len];
    for c in chunks {
        for (t, h) in total.iter_mut().zip(c) {
            *t += h as u64;
        }
    }
    Ok(ExpectedLocalTimeTable {
        horizon: n,
        values: total.iter().map(|&t| t as f64 / samples as f64).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law(support: &[i64], probs: &[f64]) -> IncrementLaw {
        IncrementLaw::RenewalFinite {
            support: support.to_vec(),
            probs: probs.to_vec(),
        }
    }

    #[test]
    fn unit_steps_visit_each_site_once() {
        let t = expected_localtime_renewal(&law(&[1], &[1.0]), 50, DEFAULT_TABLE_BUDGET).unwrap();
        assert_eq!(t.values.len(), 50);
        assert!(t.values.iter().all(|&v| v == 1.0));
        assert_eq!(t.get(51), 0.0);
    }

    #[test]
    fn renewal_mass_by_hand() {
        let u = renewal_mass(&law(&[1, 2], &[0.5, 0.5]), 3).unwrap();
        assert_eq!(u, vec![1.0, 0.5, 0.75, 0.625]);
        let far = renewal_mass(&law(&[1, 2], &[0.5, 0.5]), 200).unwrap();
        assert!((far[200] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn fft_and_direct_convolution_agree() {
        let a: Vec<f64> = (0..300).map(|i| ((i * 7919) % 13) as f64 / 13.0).collect();
        let b: Vec<f64> = (0..200)
            .map(|i| ((i * 104729) % 17) as f64 / 17.0)
            .collect();
        let fast = convolve(&a, &b);
        let mut slow = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                slow[i + j] += x * y;
            }
        }
        for (f, s) in fast.iter().zip(&slow) {
            assert!((f - s).abs() < 1e-10);
        }
    }

    #[test]
    fn binomial_sum_law() {
        let (offset, pmf) = sum_pmf(&law(&[1, 2], &[0.5, 0.5]), 10).unwrap();
        assert_eq!(offset, 10);
        assert_eq!(pmf.len(), 11);
        let c = [
            1.0, 10.0, 45.0, 120.0, 210.0, 252.0, 210.0, 120.0, 45.0, 10.0, 1.0,
        ];
        for (p, c) in pmf.iter().zip(c) {
            assert!((p - c / 1024.0).abs() < 1e-15);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let e = expected_localtime_renewal(&law(&[1, 2], &[0.5, 0.5]), 1000, 1500);
        assert!(matches!(e, Err(Error::Resource { .. })));
    }

    #[test]
    fn non_renewal_law_is_rejected() {
        assert!(expected_localtime_renewal(&IncrementLaw::SimpleWalk { dim: 1 }, 10, 100).is_err());
    }
}
