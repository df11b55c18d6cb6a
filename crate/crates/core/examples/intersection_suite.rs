//! Mutual intersections of two renewal walks over a horizon grid, with the
//! report written to disk.

use rwrs::harness::{self, SuiteKind, SuiteSpec};
use rwrs::{ExperimentSpec, IncrementLaw};

fn main() -> rwrs::Result<()> {
    let walk = IncrementLaw::RenewalFinite {
        support: vec![1, 2],
        probs: vec![0.5, 0.5],
    };
    let spec = ExperimentSpec::Suite(SuiteSpec::new(
        SuiteKind::Intersection,
        walk,
        vec![1000, 4000, 16_000],
        500,
        9,
    ));
    let report = harness::run(&spec)?;
    for row in &report.summary {
        println!("{:>6} {:<24} {:.5}", row.horizon, row.quantity, row.value);
    }
    for line in report.verdict_lines() {
        println!("{line}");
    }
    let dir = std::env::temp_dir().join("rwrs-intersection-suite");
    for path in harness::write_report(&report, &dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
