//! Quenched sums for the planar simple walk, normalized by sqrt(n log n), and
//! the self-intersection ratio they are compared with. At these horizons both
//! sit near 2/pi, twice the target the harness checks against.

use rwrs::harness::{run_quenched, QuenchedExperimentSpec, ScenerySpec};
use rwrs::{IncrementLaw, SceneryLaw, Theorem};

fn main() -> rwrs::Result<()> {
    let scenery = ScenerySpec {
        law: SceneryLaw::Rademacher,
        seeds: vec![1, 2],
        dim: 2,
    };
    let mut spec = QuenchedExperimentSpec::new(
        Theorem::Planar,
        scenery,
        IncrementLaw::SimpleWalk { dim: 2 },
        5000,
        2000,
        7,
    );
    spec.schedule_max_m = 2;
    let report = run_quenched(&spec)?;

    println!(
        "target {:.4}",
        report.variance_target.as_ref().unwrap().value
    );
    for s in &report.seeds {
        println!("seed {}: variance {:.4}", s.scenery_seed, s.variance);
    }
    println!(
        "I_n / (n log n) over paths: {:.4} +- {:.4}",
        report.diagnostics["i_over_nlogn_mean"], report.diagnostics["i_over_nlogn_stderr"]
    );
    println!("schedule: {}", report.diagnostics["schedule"]);
    for line in report.verdict_lines() {
        println!("{line}");
    }
    Ok(())
}
