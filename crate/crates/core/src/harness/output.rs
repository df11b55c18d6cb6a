use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{EcdfSeries, ExperimentReport};
use crate::error::Result;
use crate::stats::ecdf_rows;

pub const SUMMARY_HEADER: [&str; 7] = [
    "experiment",
    "group",
    "horizon",
    "quantity",
    "value",
    "target",
    "stderr",
];
pub const ECDF_HEADER: [&str; 3] = ["sample_value", "empirical_cdf", "target_normal_cdf"];

/// Writes `bytes` to a temporary sibling, then renames it over `path`.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn ecdf_csv(series: Option<&EcdfSeries>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(ECDF_HEADER)?;
    if let Some(s) = series {
        for (x, e, t) in ecdf_rows(&s.samples, s.variance) {
            w.write_record([x.to_string(), e.to_string(), t.to_string()])?;
        }
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Writes `report.json`, `summary.csv` and `ecdf.csv` (first scenery seed)
/// into `dir`, plus `ecdf_<label>.csv` for every seed. Returns the paths.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let json = dir.join("report.json");
    write_atomic(&json, &serde_json::to_vec_pretty(report)?)?;
    written.push(json);

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_HEADER)?;
    for r in &report.summary {
        w.write_record([
            r.experiment.clone(),
            r.group.clone(),
            r.horizon.to_string(),
            r.quantity.clone(),
            r.value.to_string(),
            fmt_opt(r.target),
            fmt_opt(r.stderr),
        ])?;
    }
    let summary = dir.join("summary.csv");
    write_atomic(&summary, &w.into_inner().map_err(|e| e.into_error())?)?;
    written.push(summary);

    let ecdf = dir.join("ecdf.csv");
    write_atomic(&ecdf, &ecdf_csv(report.ecdf.first())?)?;
    written.push(ecdf);
    for s in &report.ecdf {
        let label: String = s
            .label
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect();
        let path = dir.join(format!("ecdf_{label}.csv"));
        write_atomic(&path, &ecdf_csv(Some(s))?)?;
        written.push(path);
    }
    Ok(written)
}
