//! Summary statistics for the experiment outputs.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::limits::gaussian_moment;

/// `P(Z <= x)` for `Z ~ N(0, variance)`.
pub fn normal_cdf(x: f64, variance: f64) -> f64 {
    if variance <= 0.0 {
        return if x >= 0.0 { 1.0 } else { 0.0 };
    }
    0.5 * erfc(-x / (2.0 * variance).sqrt())
}

/// Kolmogorov distribution tail `P(K > lambda)`.
pub fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100i32 {
        let term = (-2.0 * (k as f64 * lambda).powi(2)).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub samples: usize,
    /// Fewer than two distinct values: the test says nothing useful.
    pub degenerate: bool,
    /// Set when the samples live on a lattice of this spacing and the
    /// statistic was computed with the continuity correction.
    pub lattice_spacing: Option<f64>,
}

/// One-sample Kolmogorov–Smirnov test against `N(0, variance)`.
pub fn ks_normal(samples: &[f64], variance: f64) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::usage("KS test needs at least one sample"));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Integrity("non-finite sample in KS test".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    if xs.first() == xs.last() {
        return Ok(KsResult {
            statistic: 1.0,
            p_value: 0.0,
            samples: xs.len(),
            degenerate: true,
            lattice_spacing: None,
        });
    }
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = normal_cdf(x, variance);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(KsResult {
        statistic: d,
        p_value: ks_p_value(d, xs.len()),
        samples: xs.len(),
        degenerate: false,
        lattice_spacing: None,
    })
}

fn ks_p_value(d: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    kolmogorov_tail((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)
}

/// KS test for samples on a lattice `a + spacing Z` against `N(0, variance)`.
///
/// An atom at `x` stands for the cell `(x - h/2, x + h/2]`, so the empirical
/// CDF just after `x` is compared with `Phi(x + h/2)` and just before `x` with
/// `Phi(x - h/2)`. Without the correction the jumps of the empirical CDF alone
/// inflate the statistic by up to half an atom's mass. Falls back to the
/// plain test for degenerate samples.
pub fn ks_normal_lattice(samples: &[f64], variance: f64, spacing: f64) -> Result<KsResult> {
    let plain = ks_normal(samples, variance)?;
    if plain.degenerate || !(spacing > 0.0) {
        return Ok(plain);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let half = spacing / 2.0;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < n {
        let x = xs[i];
        let mut j = i;
        while j < n && xs[j] == x {
            j += 1;
        }
        let before = i as f64 / n as f64;
        let after = j as f64 / n as f64;
        d = d
            .max((after - normal_cdf(x + half, variance)).abs())
            .max((before - normal_cdf(x - half, variance)).abs());
        i = j;
    }
    Ok(KsResult {
        statistic: d,
        p_value: ks_p_value(d, n),
        samples: n,
        degenerate: false,
        lattice_spacing: Some(spacing),
    })
}

/// Sorted samples with their empirical CDF and the target normal CDF.
pub fn ecdf_rows(samples: &[f64], variance: f64) -> Vec<(f64, f64, f64)> {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| (x, (i + 1) as f64 / n, normal_cdf(x, variance)))
        .collect()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; zero for fewer than two samples.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub order: u32,
    pub empirical: f64,
    pub stderr: f64,
    pub target: f64,
}

/// Raw moments of orders `1..=max_order` with jackknife standard errors.
///
/// The leave-one-out raw moment is `(S - x_i^k) / (n - 1)`, so the jackknife
/// costs `O(n)` per order.
pub fn empirical_moments(xs: &[f64], max_order: u32, variance: f64) -> Vec<MomentEstimate> {
    let n = xs.len();
    (1..=max_order)
        .map(|k| {
            let pows: Vec<f64> = xs.iter().map(|x| x.powi(k as i32)).collect();
            let total: f64 = pows.iter().sum();
            let full = total / n as f64;
            let stderr = if n < 2 {
                f64::NAN
            } else {
                let loo: Vec<f64> = pows.iter().map(|p| (total - p) / (n - 1) as f64).collect();
                let lm = mean(&loo);
                (((n - 1) as f64 / n as f64) * loo.iter().map(|l| (l - lm).powi(2)).sum::<f64>())
                    .sqrt()
            };
            MomentEstimate {
                order: k,
                empirical: full,
                stderr,
                target: gaussian_moment(k, variance),
            }
        })
        .collect()
}

/// Least-squares slope of `y` on `x`.
pub fn regression_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::usage("regression needs two or more paired points"));
    }
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("regression abscissae are all equal"));
    }
    Ok(sxy / sxx)
}

/// Slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(Error::domain("log-log slope needs positive data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    regression_slope(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_values() {
        assert!((normal_cdf(0.0, 1.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.959963984540054, 1.0) - 0.975).abs() < 1e-11);
        assert!((normal_cdf(2.0, 4.0) - normal_cdf(1.0, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn kolmogorov_tail_values() {
        // Standard critical values.
        assert!((kolmogorov_tail(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_tail(1.6276) - 0.01).abs() < 1e-4);
        assert_eq!(kolmogorov_tail(0.0), 1.0);
    }

    #[test]
    fn ks_on_quantiles_is_small() {
        let n = 1000;
        let xs: Vec<f64> = (0..n)
            .map(|i| {
                let p = (i as f64 + 0.5) / n as f64;
                // Bisection inverse of the normal CDF.
                let (mut lo, mut hi) = (-10.0, 10.0);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if normal_cdf(mid, 1.0) < p {
                        lo = mid
                    } else {
                        hi = mid
                    }
                }
                lo
            })
            .collect();
        let r = ks_normal(&xs, 1.0).unwrap();
        assert!(r.statistic <= 0.5 / n as f64 + 1e-9);
        assert!(r.p_value > 0.99);
        assert!(!r.degenerate);
        let shifted: Vec<f64> = xs.iter().map(|x| x + 0.5).collect();
        assert!(ks_normal(&shifted, 1.0).unwrap().p_value < 1e-10);
    }

    #[test]
    fn lattice_correction_removes_the_atom_bias() {
        // Binomial(400, 1/2) centered and scaled: lattice spacing 0.1, close to N(0, 1).
        let n = 400u64;
        let mut pmf = vec![1.0f64];
        for _ in 0..n {
            let mut next = vec![0.0; pmf.len() + 1];
            for (k, p) in pmf.iter().enumerate() {
                next[k] += p / 2.0;
                next[k + 1] += p / 2.0;
            }
            pmf = next;
        }
        // Deterministic sample of 20000 points placed at binomial quantiles.
        let m = 20_000usize;
        let mut xs = Vec::with_capacity(m);
        let mut cdf = 0.0;
        let mut k = 0;
        for i in 0..m {
            let u = (i as f64 + 0.5) / m as f64;
            while cdf + pmf[k] < u {
                cdf += pmf[k];
                k += 1;
            }
            xs.push((2.0 * k as f64 - n as f64) / (n as f64).sqrt());
        }
        let plain = ks_normal(&xs, 1.0).unwrap();
        let fixed = ks_normal_lattice(&xs, 1.0, 2.0 / (n as f64).sqrt()).unwrap();
        assert!(plain.statistic > 0.015);
        assert!(fixed.statistic < 0.002);
        assert_eq!(fixed.lattice_spacing, Some(0.1));
    }

    #[test]
    fn constant_sample_is_degenerate() {
        let r = ks_normal(&[0.0; 10], 1.0).unwrap();
        assert!(r.degenerate);
        assert!(ks_normal_lattice(&[0.0; 10], 0.0, 0.1).unwrap().statistic == 1.0);
    }

    #[test]
    fn moments_and_jackknife() {
        let xs = [1.0, -1.0, 2.0, -2.0];
        let m = empirical_moments(&xs, 2, 1.0);
        assert_eq!(m[0].empirical, 0.0);
        assert_eq!(m[1].empirical, 2.5);
        assert_eq!(m[1].target, 1.0);
        // Jackknife of a mean equals s / sqrt(n).
        let s = sample_variance(&xs).sqrt();
        assert!((m[0].stderr - s / 2.0).abs() < 1e-12);
    }

    #[test]
    fn slopes() {
        let x = [1.0, 10.0, 100.0];
        let y = [3.0, 3.0 * 10f64.powf(0.75), 3.0 * 100f64.powf(0.75)];
        assert!((log_log_slope(&x, &y).unwrap() - 0.75).abs() < 1e-12);
        assert!(regression_slope(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
