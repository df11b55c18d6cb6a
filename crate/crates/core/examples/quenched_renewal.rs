//! Quenched CLT for a renewal walk: one scenery, many walks, centered at the
//! quenched mean computed from the exact expected local times.

use rwrs::harness::{run_quenched, QuenchedExperimentSpec, ScenerySpec};
use rwrs::{IncrementLaw, SceneryLaw, Theorem};

fn main() -> rwrs::Result<()> {
    let walk = IncrementLaw::RenewalFinite {
        support: vec![1, 2],
        probs: vec![0.5, 0.5],
    };
    let scenery = ScenerySpec {
        law: SceneryLaw::Rademacher,
        seeds: vec![1, 2, 3],
        dim: 1,
    };
    let spec = QuenchedExperimentSpec::new(Theorem::Renewal, scenery, walk, 5000, 5000, 42);
    let report = run_quenched(&spec)?;

    println!(
        "target variance {:.4}",
        report.variance_target.as_ref().unwrap().value
    );
    for s in &report.seeds {
        println!(
            "seed {}: variance {:.4} +- {:.4}, KS p = {:.3}",
            s.scenery_seed, s.variance, s.variance_stderr, s.ks.p_value
        );
    }
    for line in report.verdict_lines() {
        println!("{line}");
    }
    Ok(())
}
