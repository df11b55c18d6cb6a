//! How E Q_n grows for different walks: power law, logarithmic or bounded.

use rwrs::harness::{self, growth_regime, SuiteKind, SuiteSpec};
use rwrs::{ExperimentSpec, IncrementLaw};

fn main() -> rwrs::Result<()> {
    let laws = [
        IncrementLaw::SimpleWalk { dim: 1 },
        IncrementLaw::SimpleWalk { dim: 2 },
        IncrementLaw::SimpleWalk { dim: 3 },
        IncrementLaw::SimpleWalk { dim: 4 },
        IncrementLaw::SimpleWalk { dim: 5 },
        IncrementLaw::StableTail { dim: 1, alpha: 0.8 },
    ];
    for law in &laws {
        match growth_regime(law) {
            Ok(regime) => println!("{law:?}: {regime:?}"),
            Err(e) => println!("{law:?}: {e}"),
        }
    }

    let spec = ExperimentSpec::Suite(SuiteSpec::new(
        SuiteKind::Growth,
        IncrementLaw::SimpleWalk { dim: 3 },
        vec![1000, 10_000],
        100,
        4,
    ));
    let report = harness::run(&spec)?;
    println!("{}", report.diagnostics["horizons"]);
    for line in report.verdict_lines() {
        println!("{line}");
    }
    Ok(())
}
