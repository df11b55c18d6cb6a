//! Limiting variances of the three theorems and the planar subsequence.

use rwrs::limits::{
    subsequence_t, transient_variance_series, variance_planar, variance_renewal,
    variance_transient, VarianceTarget, DEFAULT_HORIZON_BUDGET,
};
use rwrs::IncrementLaw;

fn main() -> rwrs::Result<()> {
    for m in [1.0, 1.5, 2.0, 3.0] {
        println!("renewal, mean step {m}: {:.6}", variance_renewal(m)?);
    }

    let planar = IncrementLaw::SimpleWalk { dim: 2 };
    let sigma = planar.covariance()?;
    println!("planar simple walk: {:.6}", variance_planar(&sigma)?);
    let wide = IncrementLaw::FiniteStepSymmetric {
        dim: 2,
        steps: vec![
            vec![2, 0],
            vec![-2, 0],
            vec![0, 1],
            vec![0, -1],
            vec![1, 0],
            vec![-1, 0],
        ],
        probs: vec![0.1, 0.1, 0.3, 0.3, 0.1, 0.1],
    };
    println!(
        "planar anisotropic walk: {:.6}",
        VarianceTarget::planar(&wide)?.value
    );

    for gamma in [0.3, 0.6595, 0.9] {
        println!(
            "transient, gamma {gamma}: {:.6} (series {:.6})",
            variance_transient(gamma)?,
            transient_variance_series(gamma)
        );
    }

    for m in 1..=4 {
        println!("t_{m} = {}", subsequence_t(m, 1.0, DEFAULT_HORIZON_BUDGET)?);
    }
    Ok(())
}
