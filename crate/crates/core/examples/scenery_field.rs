//! A scenery is a pure function of (seed, site): values can be read in any
//! order, from any thread, and always agree.

use rwrs::{SceneryLaw, Site, SiteField};

fn main() -> rwrs::Result<()> {
    let field = SiteField::new(2024, 2, SceneryLaw::Rademacher)?;
    for x in -2..=2 {
        let row: Vec<String> = (-2..=2)
            .map(|y| format!("{:+}", field.value(&Site::from_slice(&[x, y]).unwrap())))
            .collect();
        println!("{}", row.join(" "));
    }

    // Reading the same site twice, or through the batch call, gives the same value.
    let sites = vec![vec![3, -7], vec![0, 0], vec![3, -7]];
    let batch = field.eval_sites_batch(&sites)?;
    assert_eq!(batch[0], batch[2]);
    assert_eq!(batch[1], field.eval_site(&[0, 0])?);

    for law in [
        SceneryLaw::Rademacher,
        SceneryLaw::StandardGaussian,
        SceneryLaw::CenteredUniform,
    ] {
        let values = SiteField::new(7, 1, law)?.window_1d(100_000);
        let mean = rwrs::stats::mean(&values);
        let var = rwrs::stats::sample_variance(&values);
        println!(
            "{law:?}: mean {mean:+.4}, variance {var:.4}, fourth moment {}",
            law.fourth_moment()
        );
    }
    Ok(())
}
