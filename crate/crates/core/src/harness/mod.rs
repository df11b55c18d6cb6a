//! Quenched Monte Carlo experiments and intersection suites with pass/fail
//! reports.
//!
//! Every parallel loop collects its results in index order and reduces them
//! sequentially, so a report body does not depend on the thread count.

mod output;
mod quenched;
mod suites;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::{GammaEstimate, VarianceTarget};
use crate::scenery::SceneryLaw;
use crate::walks::{IncrementLaw, Theorem, Violation};

pub use output::{write_report, ECDF_HEADER, SUMMARY_HEADER};
pub use quenched::{
    run_quenched, run_quenched_planar, run_quenched_renewal, run_quenched_transient, SeedResult,
};
pub use suites::{growth_regime, run_growth_suite, run_intersection_suite, GrowthRegime};

/// Version of the report schema, written as `"v"`.
pub const REPORT_VERSION: u32 = 1;

/// Scenery law and the seeds of the fixed realizations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenerySpec {
    pub law: SceneryLaw,
    pub seeds: Vec<u64>,
    pub dim: usize,
}

/// How `E N_n(i)` is obtained for the renewal centering.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalTimeMode {
    #[default]
    Exact,
    MonteCarlo,
}

/// Escape-probability input of the transient variance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaSpec {
    pub horizon: u64,
    pub samples: u64,
    /// Use this value instead of estimating.
    pub value: Option<f64>,
}

impl Default for GammaSpec {
    fn default() -> Self {
        GammaSpec {
            horizon: 1_000_000,
            samples: 100_000,
            value: None,
        }
    }
}

/// Acceptance thresholds. A criterion is evaluated only when its field is set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative band around the target variance, checked on every seed.
    pub variance_rel: Option<f64>,
    /// `[lo, hi]` multiples of the target variance, checked on every seed.
    pub variance_band: Option<[f64; 2]>,
    /// Relative band around `3 v^2` for the fourth moment.
    pub fourth_moment_rel: Option<f64>,
    /// Relative band of `var(Z_[n/2])` around half the terminal variance.
    pub half_time_rel: Option<f64>,
    pub ks_alpha: Option<f64>,
    /// Seeds that must reach `p > ks_alpha`; capped at the number of seeds.
    pub ks_min_pass: Option<usize>,
    /// Odd moments of order <= 5 within this many standard errors of zero.
    pub odd_moment_stderrs: Option<f64>,
    /// The escape estimate must agree at `T/2` and `T`.
    pub gamma_stability: Option<bool>,
    /// Relative band for the mean of `Q_n/n` and `J_n/n`.
    pub mean_rel: Option<f64>,
    /// Upper bound on the log-log slope of `E(Q_n/n - 1/m)^2`.
    pub slope_max: Option<f64>,
    /// `[lo, hi]` multiples of the target for each long path.
    pub path_band: Option<[f64; 2]>,
    /// The distance to the target must shrink from the first to the last horizon.
    pub trend: Option<bool>,
    /// Bound on max/min of the normalized moment over the horizon grid.
    pub growth_factor: Option<f64>,
    /// Fraction of pairs whose `Q` is unchanged between the last two horizons.
    pub stabilized_fraction: Option<f64>,
    /// Below this many samples (or pairs) the report is marked underpowered.
    pub min_samples: Option<u64>,
}

macro_rules! merge_fields {
    ($dst:ident, $src:ident, $($f:ident),*) => { $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )* };
}

impl Tolerances {
    pub fn for_theorem(theorem: Theorem) -> Self {
        match theorem {
            Theorem::Renewal => Tolerances {
                variance_rel: Some(0.09),
                fourth_moment_rel: Some(0.15),
                ks_alpha: Some(0.001),
                ks_min_pass: Some(4),
                min_samples: Some(1000),
                ..Default::default()
            },
            Theorem::Planar => Tolerances {
                variance_band: Some([0.7, 1.4]),
                ks_alpha: Some(0.001),
                min_samples: Some(1000),
                ..Default::default()
            },
            Theorem::Transient => Tolerances {
                variance_rel: Some(0.07),
                half_time_rel: Some(0.10),
                ks_alpha: Some(0.001),
                ks_min_pass: Some(2),
                gamma_stability: Some(true),
                min_samples: Some(1000),
                ..Default::default()
            },
        }
    }

    pub fn for_intersection() -> Self {
        Tolerances {
            mean_rel: Some(0.02),
            slope_max: Some(-0.8),
            path_band: Some([0.8, 1.3]),
            trend: Some(true),
            min_samples: Some(5),
            ..Default::default()
        }
    }

    pub fn for_growth() -> Self {
        Tolerances {
            growth_factor: Some(3.0),
            stabilized_fraction: Some(0.95),
            min_samples: Some(20),
            ..Default::default()
        }
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merged(mut self, other: &Tolerances) -> Self {
        merge_fields!(
            self,
            other,
            variance_rel,
            variance_band,
            fourth_moment_rel,
            half_time_rel,
            ks_alpha,
            ks_min_pass,
            odd_moment_stderrs,
            gamma_stability,
            mean_rel,
            slope_max,
            path_band,
            trend,
            growth_factor,
            stabilized_fraction,
            min_samples
        );
        self
    }
}

/// One quenched central limit experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuenchedExperimentSpec {
    pub theorem: Theorem,
    pub scenery: ScenerySpec,
    pub walk: IncrementLaw,
    pub n: u64,
    /// Walk samples per scenery seed.
    pub samples: u64,
    /// Sorted times in (0, 1]; 1 is appended when missing.
    pub time_grid: Vec<f64>,
    pub moment_order: u32,
    /// Planar schedule exponent and the largest `m` run on the schedule.
    pub nu: f64,
    pub schedule_max_m: u32,
    pub gamma: GammaSpec,
    pub localtime: LocalTimeMode,
    pub localtime_samples: u64,
    pub tolerances: Tolerances,
    pub master_seed: u64,
}

impl QuenchedExperimentSpec {
    /// Spec with the default tolerances of `theorem`.
    pub fn new(
        theorem: Theorem,
        scenery: ScenerySpec,
        walk: IncrementLaw,
        n: u64,
        samples: u64,
        master_seed: u64,
    ) -> Self {
        QuenchedExperimentSpec {
            theorem,
            scenery,
            walk,
            n,
            samples,
            time_grid: if theorem == Theorem::Transient {
                vec![0.5, 1.0]
            } else {
                vec![1.0]
            },
            moment_order: 4,
            nu: 1.0,
            schedule_max_m: if theorem == Theorem::Planar { 3 } else { 0 },
            gamma: GammaSpec::default(),
            localtime: LocalTimeMode::Exact,
            localtime_samples: 100_000,
            tolerances: Tolerances::for_theorem(theorem),
            master_seed,
        }
    }

    /// Scenery and walk admissibility for the theorem.
    pub fn check(&self) -> Result<()> {
        if self.scenery.seeds.is_empty() {
            return Err(Error::usage("at least one scenery seed is required"));
        }
        if self.scenery.dim != self.walk.dim() {
            return Err(Error::usage(format!(
                "scenery dimension {} differs from walk dimension {}",
                self.scenery.dim,
                self.walk.dim()
            )));
        }
        let admissible = match self.theorem {
            Theorem::Renewal | Theorem::Planar => self.scenery.law.has_all_moments(),
            Theorem::Transient => self.scenery.law.is_centered_unit_variance(),
        };
        if !admissible {
            return Err(Error::domain(format!(
                "scenery law {:?} is not admissible for the {} theorem",
                self.scenery.law, self.theorem
            )));
        }
        if self.n == 0 || self.samples == 0 {
            return Err(Error::usage("n and M must be positive"));
        }
        if self.moment_order == 0 || self.moment_order > crate::occupation::MAX_POWER {
            return Err(Error::usage(format!(
                "moment order must lie in 1..={}",
                crate::occupation::MAX_POWER
            )));
        }
        Ok(())
    }
}

/// Which intersection functional a suite examines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    Intersection,
    Growth,
}

/// Intersection or growth suite over a horizon grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub kind: SuiteKind,
    pub walk: IncrementLaw,
    /// Increasing horizons; prefixes of the same paths are used for all of them.
    pub horizons: Vec<u64>,
    /// Replica pairs (renewal, growth) or independent long paths (planar).
    pub replicas: u64,
    /// Moment order `k` of `E Q_n^k` in the growth suite.
    pub moment: u32,
    pub tolerances: Tolerances,
    pub master_seed: u64,
}

impl SuiteSpec {
    pub fn new(
        kind: SuiteKind,
        walk: IncrementLaw,
        horizons: Vec<u64>,
        replicas: u64,
        master_seed: u64,
    ) -> Self {
        SuiteSpec {
            kind,
            walk,
            horizons,
            replicas,
            moment: 1,
            tolerances: match kind {
                SuiteKind::Intersection => Tolerances::for_intersection(),
                SuiteKind::Growth => Tolerances::for_growth(),
            },
            master_seed,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.horizons.is_empty() || self.horizons.contains(&0) {
            return Err(Error::usage(
                "horizons must be a non-empty list of positive integers",
            ));
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::usage("horizons must be strictly increasing"));
        }
        if self.replicas == 0 {
            return Err(Error::usage("M must be positive"));
        }
        if !(1..=2).contains(&self.moment) {
            return Err(Error::usage("growth moment must be 1 or 2"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ExperimentSpec {
    Quenched(QuenchedExperimentSpec),
    Suite(SuiteSpec),
}

impl ExperimentSpec {
    pub fn walk(&self) -> &IncrementLaw {
        match self {
            ExperimentSpec::Quenched(q) => &q.walk,
            ExperimentSpec::Suite(s) => &s.walk,
        }
    }

    /// Sample count compared against `min_samples`.
    pub fn samples(&self) -> u64 {
        match self {
            ExperimentSpec::Quenched(q) => q.samples,
            ExperimentSpec::Suite(s) => s.replicas,
        }
    }
}

/// A pass/fail verdict and the threshold it was judged against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub passed: bool,
    pub observed: serde_json::Value,
    pub tolerance: String,
    pub low_power: bool,
}

impl Criterion {
    pub fn new(
        name: impl Into<String>,
        passed: bool,
        observed: impl Serialize,
        tolerance: impl Into<String>,
    ) -> Self {
        Criterion {
            name: name.into(),
            passed,
            observed: serde_json::to_value(observed).unwrap_or(serde_json::Value::Null),
            tolerance: tolerance.into(),
            low_power: false,
        }
    }

    /// `PASS name: observed ... (tolerance)`.
    pub fn verdict_line(&self) -> String {
        format!(
            "{} {}: observed {} against {}{}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.observed,
            self.tolerance,
            if self.low_power { " [low power]" } else { "" }
        )
    }
}

/// One row of `summary.csv` (long format).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub group: String,
    pub horizon: u64,
    pub quantity: String,
    pub value: f64,
    pub target: Option<f64>,
    pub stderr: Option<f64>,
}

/// Normalized samples of one scenery seed, kept for `ecdf.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct EcdfSeries {
    pub label: String,
    pub samples: Vec<f64>,
    pub variance: f64,
}

/// Wall clock and resource metadata; excluded from the report body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub wall_clock_seconds: f64,
    pub threads: usize,
    pub samples_drawn: u64,
    pub crate_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub v: u32,
    pub experiment: String,
    pub spec: ExperimentSpec,
    pub validation: Vec<Violation>,
    pub variance_target: Option<VarianceTarget>,
    pub gamma: Option<GammaEstimate>,
    pub seeds: Vec<SeedResult>,
    pub diagnostics: serde_json::Map<String, serde_json::Value>,
    pub criteria: Vec<Criterion>,
    pub underpowered: bool,
    pub degenerate: bool,
    pub notes: Vec<String>,
    pub summary: Vec<SummaryRow>,
    pub meta: RunMeta,
    #[serde(skip)]
    pub ecdf: Vec<EcdfSeries>,
}

impl ExperimentReport {
    pub(crate) fn new(experiment: &str, spec: ExperimentSpec, validation: Vec<Violation>) -> Self {
        ExperimentReport {
            v: REPORT_VERSION,
            experiment: experiment.into(),
            spec,
            validation,
            variance_target: None,
            gamma: None,
            seeds: Vec::new(),
            diagnostics: serde_json::Map::new(),
            criteria: Vec::new(),
            underpowered: false,
            degenerate: false,
            notes: Vec::new(),
            summary: Vec::new(),
            meta: RunMeta {
                wall_clock_seconds: 0.0,
                threads: rayon::current_num_threads(),
                samples_drawn: 0,
                crate_version: env!("CARGO_PKG_VERSION").into(),
            },
            ecdf: Vec::new(),
        }
    }

    pub(crate) fn diag(&mut self, key: &str, value: impl Serialize) {
        self.diagnostics.insert(
            key.into(),
            serde_json::to_value(value).unwrap_or(serde_json::Value::Null),
        );
    }

    pub(crate) fn row(
        &mut self,
        group: impl Into<String>,
        horizon: u64,
        quantity: &str,
        value: f64,
        target: Option<f64>,
        stderr: Option<f64>,
    ) {
        self.summary.push(SummaryRow {
            experiment: self.experiment.clone(),
            group: group.into(),
            horizon,
            quantity: quantity.into(),
            value,
            target,
            stderr,
        });
    }

    /// True when every criterion passed.
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }

    /// The report without run metadata; identical across thread counts.
    pub fn body(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("meta");
        }
        v
    }

    pub fn verdict_lines(&self) -> Vec<String> {
        self.criteria.iter().map(Criterion::verdict_line).collect()
    }
}

/// Runs any experiment on the current rayon pool.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut report = match spec {
        ExperimentSpec::Quenched(q) => run_quenched(q)?,
        ExperimentSpec::Suite(s) => match s.kind {
            SuiteKind::Intersection => run_intersection_suite(s)?,
            SuiteKind::Growth => run_growth_suite(s)?,
        },
    };
    let min = match spec {
        ExperimentSpec::Quenched(q) => q.tolerances.min_samples,
        ExperimentSpec::Suite(s) => s.tolerances.min_samples,
    };
    if let Some(min) = min {
        if spec.samples() < min {
            report.underpowered = true;
            report.notes.push(format!(
                "underpowered: M = {} is below the minimum {min}",
                spec.samples()
            ));
            for c in &mut report.criteria {
                c.low_power = true;
            }
        }
    }
    report.meta.wall_clock_seconds = start.elapsed().as_secs_f64();
    report.meta.threads = rayon::current_num_threads();
    Ok(report)
}

/// Runs on a dedicated pool of `threads` workers (0 = rayon's default).
pub fn run_with_threads(spec: &ExperimentSpec, threads: usize) -> Result<ExperimentReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| {
            Error::resource(format!("cannot start thread pool: {e}"), "lower --threads")
        })?;
    pool.install(|| run(spec))
}

pub(crate) fn rel_band(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}
