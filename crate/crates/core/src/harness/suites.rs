use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::{rel_band, Criterion, ExperimentReport, ExperimentSpec, SuiteKind, SuiteSpec};
use crate::error::{Error, Result};
use crate::limits::{expected_localtime_renewal, variance_planar, DEFAULT_TABLE_BUDGET};
use crate::occupation::{
    mutual_intersection, recentered_moment, OccupationTable, PairIntersectionTracker,
};
use crate::rng::{tag, Stream};
use crate::site::Site;
use crate::stats::{log_log_slope, mean, median, sample_variance};
use crate::walks::{IncrementLaw, Theorem};

/// Predicted growth of `E Q_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum GrowthRegime {
    /// `E Q_n ~ n^exponent`.
    Power { exponent: f64 },
    /// `E Q_n ~ log n`.
    Logarithmic,
    /// `Q_n` converges to a finite limit.
    Bounded,
}

impl GrowthRegime {
    /// `g(n)` with `E Q_n / g(n)` bounded; `None` for the bounded regime.
    pub fn scale(&self, n: u64) -> Option<f64> {
        match self {
            GrowthRegime::Power { exponent } => Some((n as f64).powf(*exponent)),
            GrowthRegime::Logarithmic => Some((n as f64).ln()),
            GrowthRegime::Bounded => None,
        }
    }
}

/// Regime of the mutual intersection of two independent copies of `law`.
///
/// The difference of the copies returns to zero at time `t` with probability
/// of order `t^-r`, `r = d/2` (finite variance) or `d/alpha` (stable), so
/// `E Q_n` grows like `n^(2-r)` for `r < 2`, like `log n` at `r = 2`, and
/// stays bounded beyond.
pub fn growth_regime(law: &IncrementLaw) -> Result<GrowthRegime> {
    let r = match law {
        IncrementLaw::RenewalFinite { .. } => return Ok(GrowthRegime::Power { exponent: 1.0 }),
        IncrementLaw::SimpleWalk { dim } | IncrementLaw::FiniteStepSymmetric { dim, .. } => {
            if *dim == 2 {
                return Err(Error::Unsupported(
                    "planar growth of E Q_n carries a logarithmic correction; use the intersection suite".into(),
                ));
            }
            *dim as f64 / 2.0
        }
        IncrementLaw::StableTail { dim, alpha } => *dim as f64 / alpha,
    };
    Ok(if (r - 2.0).abs() < 1e-12 {
        GrowthRegime::Logarithmic
    } else if r < 2.0 {
        GrowthRegime::Power { exponent: 2.0 - r }
    } else {
        GrowthRegime::Bounded
    })
}

fn stderr_of(xs: &[f64]) -> f64 {
    (sample_variance(xs) / xs.len() as f64).sqrt()
}

/// Renewal: `Q_n/n -> 1/m`, `J_n/n -> 1 - 1/m` and the decay of
/// `E(Q_n/n - 1/m)^2`. Planar: `I_n/(n log n)` of long single paths.
pub fn run_intersection_suite(spec: &SuiteSpec) -> Result<ExperimentReport> {
    spec.check()?;
    if spec.kind != SuiteKind::Intersection {
        return Err(Error::usage("not an intersection suite"));
    }
    match spec.walk.target_theorem() {
        Theorem::Renewal => renewal_intersections(spec),
        Theorem::Planar => planar_intersections(spec),
        Theorem::Transient => Err(Error::Unsupported(
            "the intersection suite covers renewal and planar walks; use the growth suite for transient walks".into(),
        )),
    }
}

fn renewal_intersections(spec: &SuiteSpec) -> Result<ExperimentReport> {
    let validation = spec.walk.validate_for(Theorem::Renewal);
    if !validation.is_empty() {
        return Err(Error::domain(format!(
            "walk law fails the renewal hypotheses: {validation:?}"
        )));
    }
    let m = spec.walk.renewal_mean().unwrap();
    let tables = spec
        .horizons
        .iter()
        .map(|&h| expected_localtime_renewal(&spec.walk, h, DEFAULT_TABLE_BUDGET))
        .collect::<Result<Vec<_>>>()?;
    let sampler = spec.walk.sampler()?;
    let max = *spec.horizons.last().unwrap() as usize;
    let per_pair: Vec<Result<Vec<(u128, f64, f64)>>> = (0..spec.replicas)
        .into_par_iter()
        .map(|j| {
            let a =
                sampler.sample_path(max, &mut Stream::new(spec.master_seed, tag::REPLICA, j, 0));
            let b =
                sampler.sample_path(max, &mut Stream::new(spec.master_seed, tag::REPLICA, j, 1));
            spec.horizons
                .iter()
                .zip(&tables)
                .map(|(&h, table)| {
                    let ta = OccupationTable::from_positions(
                        1,
                        a.positions[..h as usize].iter().copied(),
                    );
                    let tb = OccupationTable::from_positions(
                        1,
                        b.positions[..h as usize].iter().copied(),
                    );
                    Ok((
                        mutual_intersection(&ta, &tb, 1, 1)?,
                        recentered_moment(&ta, table, 2)?,
                        recentered_moment(&tb, table, 2)?,
                    ))
                })
                .collect()
        })
        .collect();
    let per_pair = per_pair.into_iter().collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new(
        "intersection_renewal",
        ExperimentSpec::Suite(spec.clone()),
        validation,
    );
    let (q_target, j_target) = (1.0 / m, 1.0 - 1.0 / m);
    let mut q_means = Vec::new();
    let mut j_means = Vec::new();
    let mut sq = Vec::new();
    let mut rows = Vec::new();
    for (k, (&h, table)) in spec.horizons.iter().zip(&tables).enumerate() {
        let q: Vec<f64> = per_pair.iter().map(|p| p[k].0 as f64 / h as f64).collect();
        let jv: Vec<f64> = per_pair
            .iter()
            .flat_map(|p| [p[k].1 / h as f64, p[k].2 / h as f64])
            .collect();
        let dev: Vec<f64> = q.iter().map(|x| (x - q_target).powi(2)).collect();
        let qm = mean(&q);
        let jm = mean(&jv);
        let sm = mean(&dev);
        let eq = table.sum_of_squares() / h as f64;
        rows.push(serde_json::json!({
            "n": h,
            "q_over_n_mean": qm,
            "q_over_n_stderr": stderr_of(&q),
            "j_over_n_mean": jm,
            "j_over_n_stderr": stderr_of(&jv),
            "q_deviation_second_moment": sm,
            "expected_q_over_n_from_table": eq,
        }));
        report.row(
            "q_over_n",
            h,
            "mean",
            qm,
            Some(q_target),
            Some(stderr_of(&q)),
        );
        report.row(
            "j_over_n",
            h,
            "mean",
            jm,
            Some(j_target),
            Some(stderr_of(&jv)),
        );
        report.row(
            "q_deviation",
            h,
            "second_moment",
            sm,
            None,
            Some(stderr_of(&dev)),
        );
        report.row(
            "q_over_n",
            h,
            "expected_from_table",
            eq,
            Some(q_target),
            None,
        );
        q_means.push(qm);
        j_means.push(jm);
        sq.push(sm);
    }
    report.diag("interarrival_mean", m);
    report.diag("horizons", rows);

    let tol = &spec.tolerances;
    if let Some(rel) = tol.mean_rel {
        let qm = *q_means.last().unwrap();
        let jm = *j_means.last().unwrap();
        report.criteria.push(Criterion::new(
            "q_mean",
            rel_band(qm, q_target, rel),
            qm,
            format!("1/m = {q_target:.6} +- {:.1}% at n = {max}", rel * 100.0),
        ));
        report.criteria.push(Criterion::new(
            "j_mean",
            rel_band(jm, j_target, rel),
            jm,
            format!(
                "1 - 1/m = {j_target:.6} +- {:.1}% at n = {max}",
                rel * 100.0
            ),
        ));
    }
    if let Some(bound) = tol.slope_max {
        if spec.horizons.len() >= 2 {
            let x: Vec<f64> = spec.horizons.iter().map(|&h| h as f64).collect();
            let slope = log_log_slope(&x, &sq)?;
            report.row(
                "q_deviation",
                max as u64,
                "log_log_slope",
                slope,
                Some(-1.0),
                None,
            );
            report.criteria.push(Criterion::new(
                "q_variance_slope",
                slope <= bound,
                slope,
                format!("log-log slope of E(Q_n/n - 1/m)^2 <= {bound}"),
            ));
        }
    }
    report.meta.samples_drawn = 2 * spec.replicas;
    Ok(report)
}

fn planar_intersections(spec: &SuiteSpec) -> Result<ExperimentReport> {
    let validation = spec.walk.validate_for(Theorem::Planar);
    if !validation.is_empty() {
        return Err(Error::domain(format!(
            "walk law fails the planar hypotheses: {validation:?}"
        )));
    }
    if spec.horizons[0] < 2 {
        return Err(Error::usage("planar horizons must be at least 2"));
    }
    let sigma2 = variance_planar(&spec.walk.covariance()?)?;
    let sampler = spec.walk.sampler()?;
    let max = *spec.horizons.last().unwrap();
    let per_path: Vec<Vec<u128>> = (0..spec.replicas)
        .into_par_iter()
        .map(|j| {
            let mut rng = Stream::new(spec.master_seed, tag::PLANAR_PATH, j, 0);
            let mut counts: FxHashMap<Site, u64> = FxHashMap::default();
            let mut i_n: u128 = 0;
            let mut out = Vec::with_capacity(spec.horizons.len());
            let mut next = 0;
            for (k, s) in sampler.positions(&mut rng).take(max as usize).enumerate() {
                let c = counts.entry(s).or_insert(0);
                i_n += 2 * *c as u128 + 1;
                *c += 1;
                if spec.horizons[next] == k as u64 + 1 {
                    out.push(i_n);
                    next += 1;
                }
            }
            out
        })
        .collect();

    let mut report = ExperimentReport::new(
        "intersection_planar",
        ExperimentSpec::Suite(spec.clone()),
        validation,
    );
    let mut mean_ratios = Vec::new();
    let mut rows = Vec::new();
    for (k, &h) in spec.horizons.iter().enumerate() {
        let scale = h as f64 * (h as f64).ln();
        let ratios: Vec<f64> = per_path
            .iter()
            .map(|p| p[k] as f64 / scale / sigma2)
            .collect();
        for (j, r) in ratios.iter().enumerate() {
            report.row(
                format!("path={j}"),
                h,
                "i_over_nlogn_ratio",
                *r,
                Some(1.0),
                None,
            );
        }
        let mr = mean(&ratios);
        report.row(
            "all_paths",
            h,
            "i_over_nlogn_ratio_mean",
            mr,
            Some(1.0),
            Some(stderr_of(&ratios)),
        );
        rows.push(serde_json::json!({ "n": h, "ratios": ratios, "mean_ratio": mr }));
        mean_ratios.push(mr);
    }
    report.diag("target", sigma2);
    report.diag("horizons", rows);

    let tol = &spec.tolerances;
    if let Some([lo, hi]) = tol.path_band {
        let last: Vec<f64> = per_path
            .iter()
            .map(|p| *p.last().unwrap() as f64 / (max as f64 * (max as f64).ln()) / sigma2)
            .collect();
        report.criteria.push(Criterion::new(
            "path_ratio",
            last.iter().all(|&r| r >= lo && r <= hi),
            &last,
            format!("I_n/(n log n) in [{lo}, {hi}] x {sigma2:.6} for every path at n = {max}"),
        ));
    }
    if tol.trend == Some(true) && spec.horizons.len() >= 2 {
        let first = (mean_ratios[0] - 1.0).abs();
        let last = (mean_ratios.last().unwrap() - 1.0).abs();
        report.criteria.push(Criterion::new(
            "trend",
            last < first,
            [first, last],
            format!(
                "|mean ratio - 1| shrinks from n = {} to n = {max}",
                spec.horizons[0]
            ),
        ));
    }
    report.meta.samples_drawn = spec.replicas;
    Ok(report)
}

/// `E Q_n^k` over a horizon grid divided by its predicted growth, and the
/// stabilization of `Q_n` in the bounded regime.
pub fn run_growth_suite(spec: &SuiteSpec) -> Result<ExperimentReport> {
    spec.check()?;
    if spec.kind != SuiteKind::Growth {
        return Err(Error::usage("not a growth suite"));
    }
    let validation = spec.walk.validate();
    if validation
        .iter()
        .any(|v| v.hypothesis == crate::walks::Hypothesis::WellFormed)
    {
        return Err(Error::domain(format!("malformed walk law: {validation:?}")));
    }
    let regime = growth_regime(&spec.walk)?;
    if regime == GrowthRegime::Logarithmic && spec.horizons[0] < 2 {
        return Err(Error::usage(
            "logarithmic normalization needs horizons >= 2",
        ));
    }
    let sampler = spec.walk.sampler()?;
    let max = *spec.horizons.last().unwrap();
    let per_pair: Vec<Vec<u128>> = (0..spec.replicas)
        .into_par_iter()
        .map(|j| {
            let mut ra = Stream::new(spec.master_seed, tag::GROWTH, j, 0);
            let mut rb = Stream::new(spec.master_seed, tag::GROWTH, j, 1);
            let mut tracker = PairIntersectionTracker::new();
            let mut out = Vec::with_capacity(spec.horizons.len());
            let mut next = 0;
            let pa = sampler.positions(&mut ra);
            let pb = sampler.positions(&mut rb);
            for (x, y) in pa.zip(pb).take(max as usize) {
                tracker.step(x, y);
                if spec.horizons[next] == tracker.steps() {
                    out.push(tracker.q());
                    next += 1;
                }
            }
            out
        })
        .collect();

    let mut report =
        ExperimentReport::new("growth", ExperimentSpec::Suite(spec.clone()), validation);
    report.diag("regime", regime);
    let k = spec.moment as i32;
    let mut normalized = Vec::new();
    let mut medians = Vec::new();
    let mut rows = Vec::new();
    for (i, &h) in spec.horizons.iter().enumerate() {
        let q: Vec<f64> = per_pair.iter().map(|p| p[i] as f64).collect();
        let qk: Vec<f64> = q.iter().map(|x| x.powi(k)).collect();
        let moment = mean(&qk);
        let med = median(&q);
        report.row(
            "q",
            h,
            &format!("moment_{k}"),
            moment,
            None,
            Some(stderr_of(&qk)),
        );
        report.row("q", h, "median", med, None, None);
        let norm = regime.scale(h).map(|g| moment / g.powi(k));
        if let Some(v) = norm {
            report.row("q", h, &format!("normalized_moment_{k}"), v, None, None);
            normalized.push(v);
        }
        rows.push(
            serde_json::json!({ "n": h, "moment": moment, "median": med, "normalized": norm }),
        );
        medians.push(med);
    }
    report.diag("horizons", rows);

    let tol = &spec.tolerances;
    if let (Some(factor), false) = (tol.growth_factor, normalized.is_empty()) {
        let hi = normalized.iter().cloned().fold(f64::MIN, f64::max);
        let lo = normalized.iter().cloned().fold(f64::MAX, f64::min);
        let ratio = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        report.criteria.push(Criterion::new(
            "growth_bounded",
            ratio <= factor,
            serde_json::json!({ "normalized": normalized, "max_over_min": ratio }),
            format!("max/min of E Q_n^{k} / g(n)^{k} over the grid <= {factor}"),
        ));
    }
    if regime == GrowthRegime::Bounded && spec.horizons.len() >= 2 {
        let n = spec.horizons.len();
        let unchanged = per_pair.iter().filter(|p| p[n - 1] == p[n - 2]).count();
        let frac = unchanged as f64 / per_pair.len() as f64;
        report.row("q", max, "unchanged_fraction", frac, None, None);
        if let Some(min_frac) = tol.stabilized_fraction {
            report.criteria.push(Criterion::new(
                "stabilized_fraction",
                frac >= min_frac,
                frac,
                format!(
                    "fraction of pairs with Q unchanged from n = {} to n = {max} >= {min_frac}",
                    spec.horizons[n - 2]
                ),
            ));
            report.criteria.push(Criterion::new(
                "median_stable",
                medians[n - 1] == medians[n - 2],
                [medians[n - 2], medians[n - 1]],
                format!(
                    "median Q equal at n = {} and n = {max}",
                    spec.horizons[n - 2]
                ),
            ));
        }
    }
    report.meta.samples_drawn = 2 * spec.replicas;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        assert_eq!(
            growth_regime(&IncrementLaw::SimpleWalk { dim: 3 }).unwrap(),
            GrowthRegime::Power { exponent: 0.5 }
        );
        assert_eq!(
            growth_regime(&IncrementLaw::SimpleWalk { dim: 4 }).unwrap(),
            GrowthRegime::Logarithmic
        );
        assert_eq!(
            growth_regime(&IncrementLaw::SimpleWalk { dim: 5 }).unwrap(),
            GrowthRegime::Bounded
        );
        match growth_regime(&IncrementLaw::StableTail { dim: 1, alpha: 0.8 }).unwrap() {
            GrowthRegime::Power { exponent } => assert!((exponent - 0.75).abs() < 1e-12),
            r => panic!("{r:?}"),
        }
        assert!(growth_regime(&IncrementLaw::SimpleWalk { dim: 2 }).is_err());
    }

    #[test]
    fn small_renewal_suite_runs() {
        let law = IncrementLaw::RenewalFinite {
            support: vec![1, 2],
            probs: vec![0.5, 0.5],
        };
        let spec = SuiteSpec::new(SuiteKind::Intersection, law, vec![100, 1000], 20, 5);
        let r = run_intersection_suite(&spec).unwrap();
        assert_eq!(r.criteria.len(), 3);
        let q = r.criterion("q_mean").unwrap().observed.as_f64().unwrap();
        assert!((q - 2.0 / 3.0).abs() < 0.05);
    }

    #[test]
    fn deterministic_walk_has_full_overlap() {
        let law = IncrementLaw::RenewalFinite {
            support: vec![1],
            probs: vec![1.0],
        };
        let spec = SuiteSpec::new(SuiteKind::Growth, law, vec![10, 100], 3, 1);
        let r = run_growth_suite(&spec).unwrap();
        // Q_n = n exactly, so E Q_n / n = 1 at every horizon.
        let c = r.criterion("growth_bounded").unwrap();
        assert!(c.passed);
        assert_eq!(c.observed["max_over_min"], 1.0);
    }
}
