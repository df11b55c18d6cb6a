//! Sampling each increment law, checking hypotheses, and reading covariances.

use rwrs::rng::Stream;
use rwrs::walks::sample_path;
use rwrs::{IncrementLaw, Theorem};

fn main() -> rwrs::Result<()> {
    let laws = [
        IncrementLaw::RenewalFinite {
            support: vec![1, 2, 3],
            probs: vec![0.2, 0.5, 0.3],
        },
        IncrementLaw::SimpleWalk { dim: 2 },
        IncrementLaw::FiniteStepSymmetric {
            dim: 2,
            steps: vec![vec![1, 1], vec![-1, -1], vec![1, -1], vec![-1, 1]],
            probs: vec![0.25; 4],
        },
        IncrementLaw::SimpleWalk { dim: 3 },
        IncrementLaw::StableTail { dim: 1, alpha: 0.8 },
    ];
    let mut rng = Stream::from_seed(11);
    for law in &laws {
        let path = sample_path(law, 10, &mut rng)?;
        let end = path.positions.last().unwrap().coords(law.dim()).to_vec();
        println!("{law:?}");
        println!(
            "  theorem {}, position after 10 steps {end:?}",
            law.target_theorem()
        );
        match law.covariance() {
            Ok(c) => println!(
                "  covariance {:?}",
                (0..law.dim()).map(|i| c.get(i, i)).collect::<Vec<_>>()
            ),
            Err(e) => println!("  covariance: {e}"),
        }
    }

    // The diagonal walk is planar but lives on a sublattice, so it is periodic.
    for v in laws[2].validate_for(Theorem::Planar) {
        println!("violation: {v}");
    }
    let periodic = IncrementLaw::RenewalFinite {
        support: vec![2, 4],
        probs: vec![0.5, 0.5],
    };
    for v in periodic.validate() {
        println!("violation: {v}");
    }
    Ok(())
}
