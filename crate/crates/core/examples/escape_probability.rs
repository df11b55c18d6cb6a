//! Monte Carlo escape probabilities of transient walks.

use rwrs::limits::{estimate_gamma, gamma_ladder};
use rwrs::IncrementLaw;

fn main() -> rwrs::Result<()> {
    let cubic = IncrementLaw::SimpleWalk { dim: 3 };
    let g = estimate_gamma(&cubic, 20_000, 5000, 1)?;
    println!(
        "Z^3 simple walk: gamma {:.4} +- {:.4} (at T/2: {:.4}, converged {})",
        g.estimate, g.stderr, g.half_horizon_estimate, g.converged
    );

    // A d = 1 walk with index 0.8 is transient but returns slowly; the
    // estimate creeps down as the horizon grows.
    let stable = IncrementLaw::StableTail { dim: 1, alpha: 0.8 };
    for e in gamma_ladder(&stable, &[1000, 10_000, 100_000], 2000, 2)? {
        println!(
            "stable 0.8, T = {:>6}: gamma {:.4} +- {:.4}",
            e.horizon, e.estimate, e.stderr
        );
    }

    let renewal = IncrementLaw::RenewalFinite {
        support: vec![1, 2],
        probs: vec![0.5, 0.5],
    };
    let r = estimate_gamma(&renewal, 100, 100, 3)?;
    println!(
        "renewal walk: gamma {} ({} warnings)",
        r.estimate,
        r.warnings.len()
    );
    Ok(())
}
