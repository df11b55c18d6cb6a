use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    rel_band, Criterion, EcdfSeries, ExperimentReport, ExperimentSpec, LocalTimeMode,
    QuenchedExperimentSpec, Tolerances,
};
use crate::error::{Error, Result};
use crate::limits::{
    estimate_gamma, expected_localtime_monte_carlo, expected_localtime_renewal, subsequence_t,
    VarianceTarget, DEFAULT_HORIZON_BUDGET, DEFAULT_TABLE_BUDGET,
};
use crate::occupation::{grid_marks, partial_sums_at, OccupationTable};
use crate::rng::{mix_words, tag, Stream};
use crate::scenery::{SceneryLaw, SiteField};
use crate::stats::{
    empirical_moments, ks_normal, ks_normal_lattice, mean, sample_variance, KsResult,
    MomentEstimate,
};
use crate::walks::{IncrementLaw, Theorem, WalkSampler};

/// Paths used for the `E I_n / (n log n)` cross-check of planar runs.
const PLANAR_INTERSECTION_PATHS: u64 = 200;

/// Second moment of the normalized sum at one grid time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub t: f64,
    pub steps: u64,
    pub variance: f64,
    pub target: f64,
}

/// Results for one fixed scenery.
///
/// `variance` is the empirical second moment of the normalized sum, taken
/// around the theoretical center (the table mean for renewal walks, zero
/// otherwise); `sample_variance` re-centers at the sample mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub scenery_seed: u64,
    pub horizon: u64,
    pub samples: u64,
    pub centering: Option<f64>,
    pub normalization: f64,
    pub variance: f64,
    pub variance_stderr: f64,
    pub variance_ratio: f64,
    pub sample_variance: f64,
    pub moments: Vec<MomentEstimate>,
    /// KS test of the terminal samples; continuity corrected for lattice sums.
    pub ks: KsResult,
    /// The plain KS test when `ks` carries the lattice correction.
    pub ks_uncorrected: Option<KsResult>,
    pub grid: Vec<GridPoint>,
    pub increment_correlation: Option<f64>,
}

/// Partial sums `Z_[nt]` of `samples` independent walks on one scenery.
#[allow(clippy::too_many_arguments)]
fn draw_partial_sums(
    sampler: &WalkSampler,
    field: &SiteField,
    window: Option<&[f64]>,
    marks: &[u64],
    master: u64,
    stream_tag: u64,
    seed: u64,
    samples: u64,
) -> Vec<Vec<f64>> {
    let last = *marks.last().unwrap();
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = Stream::new(master, stream_tag, seed, i);
            match window {
                Some(w) => {
                    let mut out = Vec::with_capacity(marks.len());
                    let mut z = 0.0;
                    let mut next = 0;
                    for (k, s) in sampler.positions(&mut rng).take(last as usize).enumerate() {
                        z += w[s.0[0] as usize - 1];
                        while next < marks.len() && marks[next] == k as u64 + 1 {
                            out.push(z);
                            next += 1;
                        }
                    }
                    out
                }
                None => partial_sums_at(sampler.positions(&mut rng), field, marks),
            }
        })
        .collect()
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

struct SeedInput<'a> {
    seed: u64,
    horizon: u64,
    raw: &'a [Vec<f64>],
    marks: &'a [u64],
    grid: &'a [f64],
    centering: Option<f64>,
    normalization: f64,
    variance: f64,
    moment_order: u32,
    law: SceneryLaw,
}

/// Spacing of the lattice carrying the normalized sum, if any. Rademacher
/// sums of `n` terms all have the parity of `n`.
fn lattice_spacing(law: SceneryLaw, normalization: f64) -> Option<f64> {
    match law {
        SceneryLaw::Rademacher => Some(2.0 / normalization),
        SceneryLaw::Ones => Some(1.0 / normalization),
        SceneryLaw::StandardGaussian | SceneryLaw::CenteredUniform => None,
    }
}

fn seed_result(inp: SeedInput<'_>) -> Result<(SeedResult, Vec<f64>)> {
    let last = inp.marks.len() - 1;
    let c = inp.centering.unwrap_or(0.0);
    let terminal: Vec<f64> = inp
        .raw
        .iter()
        .map(|z| (z[last] - c) / inp.normalization)
        .collect();
    let moments = empirical_moments(&terminal, inp.moment_order.max(2), inp.variance);
    let (ks, ks_uncorrected) = match lattice_spacing(inp.law, inp.normalization) {
        Some(h) => (
            ks_normal_lattice(&terminal, inp.variance, h)?,
            Some(ks_normal(&terminal, inp.variance)?),
        ),
        None => (ks_normal(&terminal, inp.variance)?, None),
    };
    let grid = inp
        .grid
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let cj = if j == last { c } else { 0.0 };
            let vals: Vec<f64> = inp
                .raw
                .iter()
                .map(|z| (z[j] - cj) / inp.normalization)
                .collect();
            GridPoint {
                t,
                steps: inp.marks[j],
                variance: vals.iter().map(|x| x * x).sum::<f64>() / vals.len() as f64,
                target: inp.variance * t,
            }
        })
        .collect();
    let increment_correlation = inp
        .grid
        .iter()
        .position(|&t| t == 0.5)
        .filter(|&h| h != last)
        .map(|h| {
            let first: Vec<f64> = inp.raw.iter().map(|z| z[h]).collect();
            let rest: Vec<f64> = inp.raw.iter().map(|z| z[last] - z[h]).collect();
            pearson(&first, &rest)
        });
    let second = &moments[1];
    Ok((
        SeedResult {
            scenery_seed: inp.seed,
            horizon: inp.horizon,
            samples: inp.raw.len() as u64,
            centering: inp.centering,
            normalization: inp.normalization,
            variance: second.empirical,
            variance_stderr: second.stderr,
            variance_ratio: if inp.variance > 0.0 {
                second.empirical / inp.variance
            } else {
                f64::NAN
            },
            sample_variance: sample_variance(&terminal),
            moments: moments
                .into_iter()
                .take(inp.moment_order as usize)
                .collect(),
            ks,
            ks_uncorrected,
            grid,
            increment_correlation,
        },
        terminal,
    ))
}

fn checked_grid(grid: &[f64], n: u64) -> Result<(Vec<f64>, Vec<u64>)> {
    let mut grid = grid.to_vec();
    if grid.last() != Some(&1.0) {
        grid.push(1.0);
    }
    let marks = grid_marks(n, &grid)?;
    Ok((grid, marks))
}

fn require_valid(walk: &IncrementLaw, theorem: Theorem) -> Result<Vec<crate::walks::Violation>> {
    let violations = walk.validate_for(theorem);
    if violations.is_empty() {
        Ok(violations)
    } else {
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        Err(Error::domain(format!(
            "walk law fails the hypotheses: {}",
            msgs.join("; ")
        )))
    }
}

fn record_seeds(report: &mut ExperimentReport, results: Vec<(SeedResult, Vec<f64>)>, v: f64) {
    for (r, terminal) in results {
        let g = format!("seed={}", r.scenery_seed);
        report.row(
            &g,
            r.horizon,
            "variance",
            r.variance,
            Some(v),
            Some(r.variance_stderr),
        );
        report.row(
            &g,
            r.horizon,
            "variance_ratio",
            r.variance_ratio,
            Some(1.0),
            None,
        );
        report.row(
            &g,
            r.horizon,
            "sample_variance",
            r.sample_variance,
            Some(v),
            None,
        );
        for m in &r.moments {
            report.row(
                &g,
                r.horizon,
                &format!("moment_{}", m.order),
                m.empirical,
                Some(m.target),
                Some(m.stderr),
            );
        }
        report.row(&g, r.horizon, "ks_statistic", r.ks.statistic, None, None);
        report.row(&g, r.horizon, "ks_p_value", r.ks.p_value, None, None);
        for p in &r.grid {
            if p.t != 1.0 {
                report.row(
                    &g,
                    p.steps,
                    &format!("variance_t{}", p.t),
                    p.variance,
                    Some(p.target),
                    None,
                );
            }
        }
        if let Some(c) = r.centering {
            report.row(&g, r.horizon, "centering", c, None, None);
        }
        if let Some(c) = r.increment_correlation {
            report.row(&g, r.horizon, "increment_correlation", c, Some(0.0), None);
        }
        if r.ks.degenerate {
            report.degenerate = true;
        }
        report.ecdf.push(EcdfSeries {
            label: g,
            samples: terminal,
            variance: v,
        });
        report.seeds.push(r);
    }
    if report.degenerate {
        report
            .notes
            .push("degenerate: all normalized samples of a seed are equal".into());
    }
}

fn quenched_criteria(tol: &Tolerances, v: f64, seeds: &[SeedResult]) -> Vec<Criterion> {
    let mut out = Vec::new();
    let variances: Vec<f64> = seeds.iter().map(|s| s.variance).collect();
    if let Some(rel) = tol.variance_rel {
        out.push(Criterion::new(
            "variance",
            variances.iter().all(|&x| rel_band(x, v, rel)),
            &variances,
            format!("target {v:.6} +- {:.1}% on every seed", rel * 100.0),
        ));
    }
    if let Some([lo, hi]) = tol.variance_band {
        let ratios: Vec<f64> = seeds.iter().map(|s| s.variance / v).collect();
        out.push(Criterion::new(
            "variance_ratio",
            ratios.iter().all(|&r| r >= lo && r <= hi),
            &ratios,
            format!("[{lo}, {hi}] x target {v:.6} on every seed"),
        ));
    }
    if let Some(rel) = tol.fourth_moment_rel {
        let target = 3.0 * v * v;
        let m4: Vec<f64> = seeds
            .iter()
            .map(|s| s.moments.get(3).map_or(f64::NAN, |m| m.empirical))
            .collect();
        out.push(Criterion::new(
            "fourth_moment",
            m4.iter().all(|&x| rel_band(x, target, rel)),
            &m4,
            format!("3 v^2 = {target:.6} +- {:.1}% on every seed", rel * 100.0),
        ));
    }
    if let (Some(alpha), Some(k)) = (tol.ks_alpha, tol.ks_min_pass) {
        let p: Vec<f64> = seeds.iter().map(|s| s.ks.p_value).collect();
        let passing = p.iter().filter(|&&x| x > alpha).count();
        let k = k.min(seeds.len());
        out.push(Criterion::new(
            "ks",
            passing >= k,
            &p,
            format!("p > {alpha} on at least {k} of {} seeds", seeds.len()),
        ));
    }
    if let Some(rel) = tol.half_time_rel {
        let pairs: Vec<Option<(f64, f64)>> = seeds
            .iter()
            .map(|s| {
                s.grid
                    .iter()
                    .find(|p| p.t == 0.5)
                    .map(|p| (p.variance, s.variance / 2.0))
            })
            .collect();
        let ok = pairs
            .iter()
            .all(|p| p.is_some_and(|(h, t)| rel_band(h, t, rel)));
        let observed: Vec<f64> = pairs
            .iter()
            .map(|p| p.map_or(f64::NAN, |(h, t)| h / t))
            .collect();
        out.push(Criterion::new(
            "half_time_variance",
            ok,
            &observed,
            format!(
                "var at t = 0.5 within +- {:.1}% of half the terminal variance (ratio 1) on every seed",
                rel * 100.0
            ),
        ));
    }
    if let Some(c) = tol.odd_moment_stderrs {
        let worst: Vec<f64> = seeds
            .iter()
            .map(|s| {
                s.moments
                    .iter()
                    .filter(|m| m.order % 2 == 1 && m.order <= 5)
                    .map(|m| m.empirical.abs() / m.stderr.max(f64::MIN_POSITIVE))
                    .fold(0.0, f64::max)
            })
            .collect();
        out.push(Criterion::new(
            "odd_moments",
            worst.iter().all(|&w| w <= c),
            &worst,
            format!("|m_k| <= {c} stderr for odd k <= 5 on every seed"),
        ));
    }
    out
}

/// Dispatches on the experiment's theorem.
pub fn run_quenched(spec: &QuenchedExperimentSpec) -> Result<ExperimentReport> {
    match spec.theorem {
        Theorem::Renewal => run_quenched_renewal(spec),
        Theorem::Planar => run_quenched_planar(spec),
        Theorem::Transient => run_quenched_transient(spec),
    }
}

/// Centered renewal sums `(Z_n - E_omega Z_n) / sqrt(n)` against `N(0, 1 - 1/m)`.
pub fn run_quenched_renewal(spec: &QuenchedExperimentSpec) -> Result<ExperimentReport> {
    spec.check()?;
    let validation = require_valid(&spec.walk, Theorem::Renewal)?;
    let target = VarianceTarget::renewal(&spec.walk)?;
    let v = target.value;
    let table = match spec.localtime {
        LocalTimeMode::Exact => {
            expected_localtime_renewal(&spec.walk, spec.n, DEFAULT_TABLE_BUDGET)?
        }
        LocalTimeMode::MonteCarlo => expected_localtime_monte_carlo(
            &spec.walk,
            spec.n,
            spec.localtime_samples,
            spec.master_seed,
        )?,
    };
    let (grid, marks) = checked_grid(&spec.time_grid, spec.n)?;
    let sampler = spec.walk.sampler()?;
    let norm = (spec.n as f64).sqrt();
    let mut report = ExperimentReport::new(
        "quenched_renewal",
        ExperimentSpec::Quenched(spec.clone()),
        validation,
    );
    let mut results = Vec::new();
    for &seed in &spec.scenery.seeds {
        let field = SiteField::new(seed, 1, spec.scenery.law)?;
        let window = field.window_1d(table.values.len());
        let centering = table.quenched_mean(&field);
        let raw = draw_partial_sums(
            &sampler,
            &field,
            Some(&window),
            &marks,
            spec.master_seed,
            tag::QUENCHED_WALK,
            seed,
            spec.samples,
        );
        results.push(seed_result(SeedInput {
            seed,
            horizon: spec.n,
            raw: &raw,
            marks: &marks,
            grid: &grid,
            centering: Some(centering),
            normalization: norm,
            variance: v,
            moment_order: spec.moment_order,
            law: spec.scenery.law,
        })?);
    }
    report.diag("localtime_mode", spec.localtime);
    report.diag("expected_range", table.values.iter().sum::<f64>());
    report.criteria = quenched_criteria(
        &spec.tolerances,
        v,
        &results.iter().map(|r| r.0.clone()).collect::<Vec<_>>(),
    );
    record_seeds(&mut report, results, v);
    report.variance_target = Some(target);
    report.meta.samples_drawn = spec.samples * spec.scenery.seeds.len() as u64;
    Ok(report)
}

/// Uncentered planar sums `Z_n / sqrt(n log n)` against `N(0, sigma^2)`, plus
/// the same statistic along the first terms of the subsequence `t_m`.
pub fn run_quenched_planar(spec: &QuenchedExperimentSpec) -> Result<ExperimentReport> {
    spec.check()?;
    let validation = require_valid(&spec.walk, Theorem::Planar)?;
    if spec.n < 2 {
        return Err(Error::usage("planar normalization needs n >= 2"));
    }
    let target = VarianceTarget::planar(&spec.walk)?;
    let v = target.value;
    let (grid, marks) = checked_grid(&spec.time_grid, spec.n)?;
    let sampler = spec.walk.sampler()?;
    let norm = (spec.n as f64 * (spec.n as f64).ln()).sqrt();
    let mut report = ExperimentReport::new(
        "quenched_planar",
        ExperimentSpec::Quenched(spec.clone()),
        validation,
    );
    report.notes.push(
        "fixed-horizon planar runs are evidence, the limit theorem is stated along t_m only".into(),
    );
    let mut results = Vec::new();
    for &seed in &spec.scenery.seeds {
        let field = SiteField::new(seed, 2, spec.scenery.law)?;
        let raw = draw_partial_sums(
            &sampler,
            &field,
            None,
            &marks,
            spec.master_seed,
            tag::QUENCHED_WALK,
            seed,
            spec.samples,
        );
        results.push(seed_result(SeedInput {
            seed,
            horizon: spec.n,
            raw: &raw,
            marks: &marks,
            grid: &grid,
            centering: None,
            normalization: norm,
            variance: v,
            moment_order: spec.moment_order,
            law: spec.scenery.law,
        })?);
    }
    let averaged = mean(&results.iter().map(|r| r.0.variance).collect::<Vec<_>>());
    report.diag("scenery_averaged_second_moment", averaged);
    report.row(
        "all_seeds",
        spec.n,
        "scenery_averaged_second_moment",
        averaged,
        Some(v),
        None,
    );

    // Averaged over sceneries the second moment is E I_n / (n log n).
    let paths = spec.samples.min(PLANAR_INTERSECTION_PATHS);
    let i_master = mix_words(spec.master_seed, &[0]);
    let n = spec.n as usize;
    let ratios: Vec<f64> = (0..paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = Stream::new(i_master, tag::PLANAR_PATH, i, 0);
            let tab = OccupationTable::from_positions(2, sampler.positions(&mut rng).take(n));
            tab.self_intersection(2).map(|x| x as f64 / (norm * norm))
        })
        .collect::<Result<_>>()?;
    let i_mean = mean(&ratios);
    let i_stderr = (sample_variance(&ratios) / paths as f64).sqrt();
    report.diag("i_over_nlogn_mean", i_mean);
    report.diag("i_over_nlogn_stderr", i_stderr);
    report.row(
        "paths",
        spec.n,
        "i_over_nlogn_mean",
        i_mean,
        Some(v),
        Some(i_stderr),
    );

    let mut schedule = Vec::new();
    for m in 1..=spec.schedule_max_m {
        let t = match subsequence_t(m, spec.nu, DEFAULT_HORIZON_BUDGET) {
            Ok(t) => t,
            Err(Error::Resource { message, .. }) => {
                report
                    .notes
                    .push(format!("schedule stopped at m = {m}: {message}"));
                break;
            }
            Err(e) => return Err(e),
        };
        let mut entry = serde_json::Map::new();
        entry.insert("m".into(), m.into());
        entry.insert("t".into(), t.into());
        if t >= 2 {
            let tnorm = (t as f64 * (t as f64).ln()).sqrt();
            let sched_master = mix_words(spec.master_seed, &[m as u64]);
            let mut ratios = Vec::new();
            for &seed in &spec.scenery.seeds {
                let field = SiteField::new(seed, 2, spec.scenery.law)?;
                let raw = draw_partial_sums(
                    &sampler,
                    &field,
                    None,
                    &[t],
                    sched_master,
                    tag::PLANAR_PATH,
                    seed,
                    spec.samples,
                );
                let m2 = raw.iter().map(|z| (z[0] / tnorm).powi(2)).sum::<f64>() / raw.len() as f64;
                ratios.push(m2 / v);
                report.row(
                    format!("seed={seed}"),
                    t,
                    &format!("schedule_variance_ratio_m{m}"),
                    m2 / v,
                    Some(1.0),
                    None,
                );
            }
            entry.insert("variance_ratio".into(), serde_json::to_value(ratios)?);
        }
        schedule.push(serde_json::Value::Object(entry));
    }
    report.diag("schedule", schedule);
    report.criteria = quenched_criteria(
        &spec.tolerances,
        v,
        &results.iter().map(|r| r.0.clone()).collect::<Vec<_>>(),
    );
    record_seeds(&mut report, results, v);
    report.variance_target = Some(target);
    report.meta.samples_drawn = spec.samples * spec.scenery.seeds.len() as u64;
    Ok(report)
}

/// Transient sums `Z_[nt] / sqrt(n)` against `sigma^2 t` with
/// `sigma^2 = (2 - gamma) / gamma`.
pub fn run_quenched_transient(spec: &QuenchedExperimentSpec) -> Result<ExperimentReport> {
    spec.check()?;
    let validation = require_valid(&spec.walk, Theorem::Transient)?;
    let mut report = ExperimentReport::new(
        "quenched_transient",
        ExperimentSpec::Quenched(spec.clone()),
        validation,
    );
    let gamma = match spec.gamma.value {
        Some(g) => {
            report
                .notes
                .push(format!("escape probability fixed at {g} by the config"));
            g
        }
        None => {
            let est = estimate_gamma(
                &spec.walk,
                spec.gamma.horizon,
                spec.gamma.samples,
                spec.master_seed,
            )?;
            let g = est.estimate;
            if spec.tolerances.gamma_stability == Some(true) {
                report.criteria.push(Criterion::new(
                    "gamma_stability",
                    est.converged,
                    [est.half_horizon_estimate, est.estimate],
                    format!(
                        "estimates at T/2 and T = {} differ by less than 2 stderr ({:.2e})",
                        est.horizon,
                        2.0 * est.stderr
                    ),
                ));
            }
            report.row(
                "gamma",
                est.horizon,
                "gamma",
                est.estimate,
                None,
                Some(est.stderr),
            );
            report.gamma = Some(est);
            g
        }
    };
    let target = VarianceTarget::transient(gamma)?;
    let v = target.value;
    let (grid, marks) = checked_grid(&spec.time_grid, spec.n)?;
    let sampler = spec.walk.sampler()?;
    let norm = (spec.n as f64).sqrt();
    let dim = spec.walk.dim();
    let mut results = Vec::new();
    for &seed in &spec.scenery.seeds {
        let field = SiteField::new(seed, dim, spec.scenery.law)?;
        let raw = draw_partial_sums(
            &sampler,
            &field,
            None,
            &marks,
            spec.master_seed,
            tag::QUENCHED_WALK,
            seed,
            spec.samples,
        );
        results.push(seed_result(SeedInput {
            seed,
            horizon: spec.n,
            raw: &raw,
            marks: &marks,
            grid: &grid,
            centering: None,
            normalization: norm,
            variance: v,
            moment_order: spec.moment_order,
            law: spec.scenery.law,
        })?);
    }
    let mut criteria = quenched_criteria(
        &spec.tolerances,
        v,
        &results.iter().map(|r| r.0.clone()).collect::<Vec<_>>(),
    );
    report.criteria.append(&mut criteria);
    record_seeds(&mut report, results, v);
    report.variance_target = Some(target);
    report.meta.samples_drawn = spec.samples * spec.scenery.seeds.len() as u64;
    Ok(report)
}
