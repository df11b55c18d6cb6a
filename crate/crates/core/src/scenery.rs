//! Quenched random scenery realized as a stateless function of
//! `(seed, site)`.
//!
//! A site value is computed from `h = mix_coords(seed, coords)` (see
//! [`crate::rng`]; coordinates are zig-zag encoded before mixing):
//!
//! | law                | value                                                     |
//! |--------------------|-----------------------------------------------------------|
//! | `Rademacher`       | `+1` if the top bit of `h` is set, else `-1`              |
//! | `CenteredUniform`  | `sqrt(3) (2 u - 1)`, `u = open_unit(h)`                   |
//! | `StandardGaussian` | Box-Muller cosine branch of `(h, mix64(h ^ 0xD1B54A32D192ED03))` |
//! | `Ones`             | `1` (debug law, not centered)                             |
//!
//! Nothing is stored, so one field can be shared by any number of threads and
//! by millions of walk samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{mix64, mix_coords, normal_from_words, open_unit};
use crate::site::{check_dim, Site};

const GAUSS_SECOND_WORD: u64 = 0xD1B5_4A32_D192_ED03;

/// Marginal law of the scenery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneryLaw {
    Rademacher,
    StandardGaussian,
    CenteredUniform,
    /// Constant one. Only for checking sums; not admissible for any theorem.
    Ones,
}

impl SceneryLaw {
    /// Symmetric, all moments finite, unit variance.
    pub fn has_all_moments(self) -> bool {
        !matches!(self, SceneryLaw::Ones)
    }

    /// Centered with unit variance.
    pub fn is_centered_unit_variance(self) -> bool {
        !matches!(self, SceneryLaw::Ones)
    }

    /// `E omega^4`.
    pub fn fourth_moment(self) -> f64 {
        match self {
            SceneryLaw::Rademacher | SceneryLaw::Ones => 1.0,
            SceneryLaw::StandardGaussian => 3.0,
            SceneryLaw::CenteredUniform => 9.0 / 5.0,
        }
    }

    #[inline(always)]
    fn transform(self, h: u64) -> f64 {
        match self {
            SceneryLaw::Rademacher => {
                if h >> 63 == 1 {
                    1.0
                } else {
                    -1.0
                }
            }
            SceneryLaw::CenteredUniform => 3f64.sqrt() * (2.0 * open_unit(h) - 1.0),
            SceneryLaw::StandardGaussian => normal_from_words(h, mix64(h ^ GAUSS_SECOND_WORD)),
            SceneryLaw::Ones => 1.0,
        }
    }
}

/// One fixed realization of the scenery over Z^d.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteField {
    pub seed: u64,
    pub dim: usize,
    pub law: SceneryLaw,
}

impl SiteField {
    pub fn new(seed: u64, dim: usize, law: SceneryLaw) -> Result<Self> {
        check_dim(dim)?;
        Ok(SiteField { seed, dim, law })
    }

    /// Value at a site given as a coordinate slice of length `dim`.
    pub fn eval_site(&self, site: &[i64]) -> Result<f64> {
        if site.len() != self.dim {
            return Err(Error::usage(format!(
                "site has {} coordinates, field dimension is {}",
                site.len(),
                self.dim
            )));
        }
        Ok(self.law.transform(mix_coords(self.seed, site)))
    }

    /// Batch form of [`SiteField::eval_site`].
    pub fn eval_sites_batch(&self, sites: &[Vec<i64>]) -> Result<Vec<f64>> {
        sites.iter().map(|s| self.eval_site(s)).collect()
    }

    /// Hot-path evaluation; coordinates past `dim` are ignored.
    #[inline(always)]
    pub fn value(&self, site: &Site) -> f64 {
        self.law
            .transform(mix_coords(self.seed, site.coords(self.dim)))
    }

    /// Values at sites `1..=len` of a one-dimensional field, index 0 holding site 1.
    pub fn window_1d(&self, len: usize) -> Vec<f64> {
        (1..=len as i64)
            .map(|i| self.law.transform(mix_coords(self.seed, &[i])))
            .collect()
    }

    /// CSV dump `x1,..,xd,value` over the box `[lo, hi]^dim`.
    pub fn dump_window_csv<W: std::io::Write>(&self, lo: i64, hi: i64, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.dim).map(|j| format!("x{j}")).collect();
        header.push("value".into());
        w.write_record(&header)?;
        let mut cur = vec![lo; self.dim];
        if lo > hi {
            return Ok(());
        }
        loop {
            let mut rec: Vec<String> = cur.iter().map(|c| c.to_string()).collect();
            rec.push(format!("{}", self.eval_site(&cur)?));
            w.write_record(&rec)?;
            let mut j = 0;
            loop {
                if j == self.dim {
                    w.flush()?;
                    return Ok(());
                }
                if cur[j] < hi {
                    cur[j] += 1;
                    break;
                }
                cur[j] = lo;
                j += 1;
            }
        }
    }
}
