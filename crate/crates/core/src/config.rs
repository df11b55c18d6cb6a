//! TOML run configuration.
//!
//! ```toml
//! [scenery]
//! law = "rademacher"
//! seeds = [1, 2, 3]
//! dim = 3
//!
//! [walk]
//! variant = "simple"
//! dim = 3
//!
//! [experiment]
//! theorem = "transient"      # or: suite = "intersection" | "growth"
//! n = 100000                 # suites take `horizons = [...]`
//! M = 10000
//!
//! [experiment.tolerances]
//! variance_rel = 0.07
//!
//! [execution]
//! master_seed = 7
//! output_dir = "out/transient"
//! ```
//!
//! Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{
    ExperimentSpec, GammaSpec, LocalTimeMode, QuenchedExperimentSpec, ScenerySpec, SuiteKind,
    SuiteSpec, Tolerances,
};
use crate::walks::{IncrementLaw, Theorem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenery: Option<ScenerySpec>,
    pub walk: IncrementLaw,
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub execution: ExecutionSection,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub theorem: Option<Theorem>,
    pub suite: Option<SuiteKind>,
    pub n: Option<u64>,
    pub horizons: Option<Vec<u64>>,
    #[serde(rename = "M")]
    pub samples: Option<u64>,
    pub time_grid: Option<Vec<f64>>,
    pub moment_order: Option<u32>,
    pub nu: Option<f64>,
    pub schedule_max_m: Option<u32>,
    pub gamma: Option<f64>,
    pub gamma_horizon: Option<u64>,
    pub gamma_samples: Option<u64>,
    pub expected_localtime: Option<LocalTimeMode>,
    pub localtime_samples: Option<u64>,
    /// Moment order `k` of the growth suite.
    pub growth_moment: Option<u32>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExecutionSection {
    /// Worker threads; 0 or absent means one per core.
    pub threads: Option<usize>,
    #[serde(default)]
    pub master_seed: u64,
    pub output_dir: Option<PathBuf>,
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

/// Parses `text` as a TOML value, falling back to a bare string.
fn override_value(text: &str) -> toml::Value {
    match toml::from_str::<toml::Table>(&format!("v = {text}")) {
        Ok(mut t) => t.remove("v").unwrap(),
        Err(_) => toml::Value::String(text.to_string()),
    }
}

/// Applies `key.path=value` to a parsed document.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (path, value) = assignment.split_once('=').ok_or_else(|| {
        config_err(format!(
            "override {assignment:?} is not of the form key.path=value"
        ))
    })?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(config_err(format!("override key {path:?} is malformed")));
    }
    let mut table = doc;
    for k in &keys[..keys.len() - 1] {
        let entry = table
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| config_err(format!("override path {path:?}: {k} is not a table")))?;
    }
    table.insert(
        keys[keys.len() - 1].to_string(),
        override_value(value.trim()),
    );
    Ok(())
}

impl RunConfig {
    /// Parses strict TOML; errors carry line and column.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(config_err)
    }

    /// Reads a file and applies overrides in order.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        if overrides.is_empty() {
            return toml::from_str(&text)
                .map_err(|e| config_err(format!("{}: {e}", path.display())));
        }
        let mut doc: toml::Table =
            toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        toml::Value::Table(doc)
            .try_into()
            .map_err(|e| config_err(format!("after overrides: {e}")))
    }

    /// Builds the experiment this config describes.
    pub fn to_spec(&self) -> Result<ExperimentSpec> {
        let e = &self.experiment;
        let seed = self.execution.master_seed;
        match (e.theorem, e.suite) {
            (Some(_), Some(_)) => Err(config_err("experiment sets both `theorem` and `suite`")),
            (None, None) => Err(config_err("experiment needs `theorem` or `suite`")),
            (Some(theorem), None) => {
                let scenery = self
                    .scenery
                    .clone()
                    .ok_or_else(|| config_err("theorem experiments need a [scenery] section"))?;
                let n = e.n.ok_or_else(|| config_err("experiment.n is required"))?;
                let m = e
                    .samples
                    .ok_or_else(|| config_err("experiment.M is required"))?;
                if e.horizons.is_some() || e.growth_moment.is_some() {
                    return Err(config_err(
                        "`horizons` and `growth_moment` belong to suites",
                    ));
                }
                let mut spec =
                    QuenchedExperimentSpec::new(theorem, scenery, self.walk.clone(), n, m, seed);
                if let Some(g) = &e.time_grid {
                    spec.time_grid = g.clone();
                }
                if let Some(k) = e.moment_order {
                    spec.moment_order = k;
                }
                if let Some(nu) = e.nu {
                    spec.nu = nu;
                }
                if let Some(mm) = e.schedule_max_m {
                    spec.schedule_max_m = mm;
                }
                let d = GammaSpec::default();
                spec.gamma = GammaSpec {
                    horizon: e.gamma_horizon.unwrap_or(d.horizon),
                    samples: e.gamma_samples.unwrap_or(d.samples),
                    value: e.gamma,
                };
                if let Some(mode) = e.expected_localtime {
                    spec.localtime = mode;
                }
                if let Some(s) = e.localtime_samples {
                    spec.localtime_samples = s;
                }
                spec.tolerances = spec.tolerances.merged(&e.tolerances);
                spec.check()?;
                Ok(ExperimentSpec::Quenched(spec))
            }
            (None, Some(kind)) => {
                if self.scenery.is_some() {
                    return Err(config_err("suites do not use a [scenery] section"));
                }
                let horizons = e
                    .horizons
                    .clone()
                    .ok_or_else(|| config_err("experiment.horizons is required for suites"))?;
                let m = e
                    .samples
                    .ok_or_else(|| config_err("experiment.M is required"))?;
                if e.n.is_some() || e.time_grid.is_some() || e.gamma.is_some() {
                    return Err(config_err(
                        "`n`, `time_grid` and `gamma` belong to theorem experiments",
                    ));
                }
                let mut spec = SuiteSpec::new(kind, self.walk.clone(), horizons, m, seed);
                if let Some(k) = e.growth_moment {
                    spec.moment = k;
                }
                spec.tolerances = spec.tolerances.merged(&e.tolerances);
                spec.check()?;
                Ok(ExperimentSpec::Suite(spec))
            }
        }
    }
}
