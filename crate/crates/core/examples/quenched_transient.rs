//! Functional CLT for a transient walk: the variance at t = 1/2 and t = 1,
//! with gamma supplied instead of estimated to keep the run short.

use rwrs::harness::{run_quenched, QuenchedExperimentSpec, ScenerySpec};
use rwrs::{IncrementLaw, SceneryLaw, Theorem};

fn main() -> rwrs::Result<()> {
    let scenery = ScenerySpec {
        law: SceneryLaw::StandardGaussian,
        seeds: vec![1, 2],
        dim: 3,
    };
    let mut spec = QuenchedExperimentSpec::new(
        Theorem::Transient,
        scenery,
        IncrementLaw::SimpleWalk { dim: 3 },
        5000,
        3000,
        3,
    );
    spec.gamma.value = Some(0.6595);
    spec.time_grid = vec![0.25, 0.5, 1.0];
    let report = run_quenched(&spec)?;

    println!(
        "target {:.4}",
        report.variance_target.as_ref().unwrap().value
    );
    for s in &report.seeds {
        let grid: Vec<String> = s.grid.iter().map(|g| format!("{g:?}")).collect();
        println!("seed {}: variance {:.4}", s.scenery_seed, s.variance);
        for g in grid {
            println!("  {g}");
        }
    }
    for line in report.verdict_lines() {
        println!("{line}");
    }
    Ok(())
}
