//! Local times of a path and the intersection functionals built from them.

use rwrs::occupation::{multi_intersection, mutual_intersection, rwrs_sum, rwrs_sum_streaming};
use rwrs::rng::Stream;
use rwrs::walks::sample_path;
use rwrs::{IncrementLaw, OccupationTable, SceneryLaw, SiteField};

fn main() -> rwrs::Result<()> {
    let law = IncrementLaw::SimpleWalk { dim: 2 };
    let n = 10_000;
    let a = sample_path(&law, n, &mut Stream::new(5, 0, 0, 0))?;
    let b = sample_path(&law, n, &mut Stream::new(5, 0, 1, 0))?;
    let (ta, tb) = (
        OccupationTable::accumulate(&a),
        OccupationTable::accumulate(&b),
    );

    println!("range {} of {} steps", ta.range_size(), ta.horizon());
    for p in 1..=4 {
        println!("I^[{p}] = {}", ta.self_intersection(p)?);
    }
    for (p, q) in [(1, 1), (2, 1), (2, 2)] {
        println!("Q^[{p},{q}] = {}", mutual_intersection(&ta, &tb, p, q)?);
    }
    println!(
        "common sites of both ranges: {}",
        multi_intersection(&[&ta, &tb])?
    );

    let field = SiteField::new(99, 2, SceneryLaw::StandardGaussian)?;
    let from_table = rwrs_sum(&ta, &field)?;
    let streamed = rwrs_sum_streaming(a.positions.iter().copied(), &field);
    println!("Z_n = {from_table:.6} (table), {streamed:.6} (streamed)");

    let mut busiest = ta.sorted();
    busiest.sort_by_key(|x| std::cmp::Reverse(x.1));
    for (site, visits) in busiest.iter().take(3) {
        println!("site {:?} visited {visits} times", site.coords(2));
    }
    Ok(())
}
