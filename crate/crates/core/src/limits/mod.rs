//! Limit constants of the three central limit theorems and the estimated
//! ingredients they need.

mod gamma;
mod renewal;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walks::{IncrementLaw, Matrix, Theorem};

pub use gamma::{estimate_gamma, first_return_times, gamma_ladder, GammaEstimate};
pub use renewal::{
    convolve, expected_localtime_monte_carlo, expected_localtime_renewal, renewal_mass, sum_pmf,
    DEFAULT_TABLE_BUDGET,
};

/// Largest horizon accepted by [`subsequence_t`] by default.
pub const DEFAULT_HORIZON_BUDGET: u64 = 1 << 40;

/// What the theorem's limiting variance is computed from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Ingredients {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Matrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

/// Limiting variance of the normalized scenery sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceTarget {
    pub theorem: Theorem,
    pub value: f64,
    pub ingredients: Ingredients,
}

impl VarianceTarget {
    pub fn renewal(law: &IncrementLaw) -> Result<Self> {
        let m = law
            .renewal_mean()
            .ok_or_else(|| Error::domain("renewal variance needs a renewal law"))?;
        Ok(VarianceTarget {
            theorem: Theorem::Renewal,
            value: variance_renewal(m)?,
            ingredients: Ingredients {
                m: Some(m),
                ..Default::default()
            },
        })
    }

    pub fn planar(law: &IncrementLaw) -> Result<Self> {
        let sigma = law.covariance()?;
        Ok(VarianceTarget {
            theorem: Theorem::Planar,
            value: variance_planar(&sigma)?,
            ingredients: Ingredients {
                sigma: Some(sigma),
                ..Default::default()
            },
        })
    }

    pub fn transient(gamma: f64) -> Result<Self> {
        Ok(VarianceTarget {
            theorem: Theorem::Transient,
            value: variance_transient(gamma)?,
            ingredients: Ingredients {
                gamma: Some(gamma),
                ..Default::default()
            },
        })
    }
}

/// `1 - 1/m` for a renewal walk with interarrival mean `m >= 1`.
pub fn variance_renewal(m: f64) -> Result<f64> {
    if !(m >= 1.0) || !m.is_finite() {
        return Err(Error::domain(format!(
            "interarrival mean {m} must be at least 1"
        )));
    }
    Ok(1.0 - 1.0 / m)
}

/// `(2 pi sqrt(det Sigma))^-1` for a 2x2 positive definite covariance.
pub fn variance_planar(sigma: &Matrix) -> Result<f64> {
    if sigma.n != 2 {
        return Err(Error::domain(format!(
            "expected a 2x2 covariance, got {0}x{0}",
            sigma.n
        )));
    }
    if !sigma.is_positive_definite(0.0) {
        return Err(Error::domain("covariance matrix is not positive definite"));
    }
    Ok(1.0 / (2.0 * PI * sigma.determinant().sqrt()))
}

/// `gamma^2 sum_{k>=1} k^2 (1-gamma)^(k-1)`, summed until a term drops below 1e-15.
pub fn transient_variance_series(gamma: f64) -> f64 {
    let x = 1.0 - gamma;
    let mut sum = 0.0;
    let mut pow = 1.0; // x^(k-1)
    let mut k = 1.0f64;
    loop {
        let term = gamma * gamma * k * k * pow;
        sum += term;
        if term < 1e-15 && k > 2.0 {
            break;
        }
        pow *= x;
        k += 1.0;
    }
    sum
}

/// Limiting variance `(2 - gamma) / gamma` of the transient case, checked
/// against the truncated series.
pub fn variance_transient(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::domain(format!(
            "escape probability {gamma} outside (0, 1]"
        )));
    }
    let closed = (2.0 - gamma) / gamma;
    let series = transient_variance_series(gamma);
    if ((closed - series) / closed).abs() > 1e-12 {
        return Err(Error::Integrity(format!(
            "series {series} and closed form {closed} disagree for gamma = {gamma}"
        )));
    }
    Ok(closed)
}

/// `floor(exp(m^(1+nu)))`, the horizons of the planar subsequence.
pub fn subsequence_t(m: u32, nu: f64, budget: u64) -> Result<u64> {
    if m == 0 || !(nu > 0.0) {
        return Err(Error::domain(format!(
            "need m >= 1 and nu > 0, got m = {m}, nu = {nu}"
        )));
    }
    let t = (m as f64).powf(1.0 + nu).exp().floor();
    if !t.is_finite() || t > budget as f64 {
        return Err(Error::resource(
            format!(
                "t_{m} = exp({m}^{}) exceeds the horizon budget {budget}",
                1.0 + nu
            ),
            "use a smaller m or nu, or run fixed horizons instead",
        ));
    }
    Ok(t as u64)
}

/// `(2k - 1)!!`, the `2k`-th moment of a standard normal.
pub fn double_factorial_odd(k: u32) -> f64 {
    (1..=k).map(|j| (2 * j - 1) as f64).product()
}

/// `E Z^k` for `Z ~ N(0, variance)`.
pub fn gaussian_moment(k: u32, variance: f64) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        double_factorial_odd(k / 2) * variance.powi((k / 2) as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renewal_variances() {
        assert_eq!(variance_renewal(1.0).unwrap(), 0.0);
        assert!((variance_renewal(1.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(variance_renewal(2.0).unwrap(), 0.5);
        assert!(matches!(variance_renewal(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn planar_variances() {
        assert!((variance_planar(&Matrix::identity(2)).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let sigma = IncrementLaw::SimpleWalk { dim: 2 }.covariance().unwrap();
        assert!((variance_planar(&sigma).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!(
            (variance_planar(&Matrix::diag(&[1.0, 4.0])).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-15
        );
        assert!(variance_planar(&Matrix::diag(&[1.0, 0.0])).is_err());
        assert!(variance_planar(&Matrix::identity(3)).is_err());
    }

    #[test]
    fn transient_variances() {
        assert_eq!(variance_transient(1.0).unwrap(), 1.0);
        assert!((variance_transient(0.5).unwrap() - 3.0).abs() < 1e-14);
        assert!((variance_transient(0.6595).unwrap() - 2.0326).abs() < 1e-4);
        assert!(variance_transient(0.0).is_err());
        assert!(variance_transient(1.2).is_err());
    }

    #[test]
    fn subsequence_values() {
        assert_eq!(subsequence_t(1, 0.3, DEFAULT_HORIZON_BUDGET).unwrap(), 2);
        assert_eq!(subsequence_t(2, 0.1, DEFAULT_HORIZON_BUDGET).unwrap(), 8);
        assert_eq!(subsequence_t(3, 1.0, DEFAULT_HORIZON_BUDGET).unwrap(), 8103);
        assert!(matches!(
            subsequence_t(10, 1.0, DEFAULT_HORIZON_BUDGET),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn gaussian_moments() {
        assert_eq!(double_factorial_odd(3), 15.0);
        assert_eq!(gaussian_moment(6, 1.0), 15.0);
        assert_eq!(gaussian_moment(3, 2.0), 0.0);
        assert!((gaussian_moment(4, 1.0 / 3.0) - 1.0 / 3.0).abs() < 1e-15);
    }
}
