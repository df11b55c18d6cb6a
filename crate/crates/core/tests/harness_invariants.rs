//! Properties of the quenched experiments that hold at any horizon.

use proptest::prelude::*;
use rwrs::harness::{run_quenched, run_with_threads, QuenchedExperimentSpec, ScenerySpec};
use rwrs::limits::{expected_localtime_renewal, DEFAULT_TABLE_BUDGET};
use rwrs::occupation::{mutual_intersection, recentered_moment, rwrs_sum};
use rwrs::rng::Stream;
use rwrs::stats::{mean, sample_variance};
use rwrs::walks::sample_path;
use rwrs::{ExperimentSpec, IncrementLaw, OccupationTable, SceneryLaw, SiteField, Theorem};

fn renewal() -> IncrementLaw {
    IncrementLaw::RenewalFinite {
        support: vec![1, 2],
        probs: vec![0.5, 0.5],
    }
}

fn scenery(seeds: std::ops::Range<u64>, dim: usize) -> ScenerySpec {
    ScenerySpec {
        law: SceneryLaw::Rademacher,
        seeds: seeds.collect(),
        dim,
    }
}

#[test]
fn odd_moments_vanish_for_renewal() {
    let mut spec = QuenchedExperimentSpec::new(
        Theorem::Renewal,
        scenery(1..6, 1),
        renewal(),
        10_000,
        4000,
        17,
    );
    spec.moment_order = 5;
    let report = run_quenched(&spec).unwrap();
    for seed in &report.seeds {
        for m in seed.moments.iter().filter(|m| m.order % 2 == 1) {
            assert!(
                m.empirical.abs() < 4.0 * m.stderr,
                "seed {} order {}: {m:?}",
                seed.scenery_seed,
                m.order
            );
        }
    }
}

#[test]
fn across_seed_spread_shrinks_with_horizon() {
    let spread = |n: u64| {
        let spec = QuenchedExperimentSpec::new(
            Theorem::Renewal,
            scenery(1..13, 1),
            renewal(),
            n,
            20_000,
            23,
        );
        let report = run_quenched(&spec).unwrap();
        sample_variance(&report.seeds.iter().map(|s| s.variance).collect::<Vec<_>>())
    };
    let (small, large) = (spread(100), spread(1000));
    assert!(large < small, "spread {small} at n=100, {large} at n=1000");
}

#[test]
fn scenery_averaged_second_moment_approaches_target() {
    // Transient walk: E Z_n^2 / n = E I_n / n rises to (2 - gamma) / gamma.
    let gaps: Vec<f64> = [10u64, 100, 1000]
        .iter()
        .map(|&n| {
            let mut spec = QuenchedExperimentSpec::new(
                Theorem::Transient,
                scenery(1..5, 3),
                IncrementLaw::SimpleWalk { dim: 3 },
                n,
                50_000,
                29,
            );
            spec.gamma.value = Some(0.6595);
            let report = run_quenched(&spec).unwrap();
            let target = report.variance_target.as_ref().unwrap().value;
            (mean(&report.seeds.iter().map(|s| s.variance).collect::<Vec<_>>()) - target).abs()
        })
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}

#[test]
fn planar_second_moment_matches_intersection_ratio() {
    let spec = QuenchedExperimentSpec::new(
        Theorem::Planar,
        scenery(1..9, 2),
        IncrementLaw::SimpleWalk { dim: 2 },
        2000,
        2000,
        31,
    );
    let report = run_quenched(&spec).unwrap();
    let per_seed: Vec<f64> = report.seeds.iter().map(|s| s.variance).collect();
    let averaged = mean(&per_seed);
    let se_seeds = (sample_variance(&per_seed) / per_seed.len() as f64).sqrt();
    let i_mean = report.diagnostics["i_over_nlogn_mean"].as_f64().unwrap();
    let i_se = report.diagnostics["i_over_nlogn_stderr"].as_f64().unwrap();
    let joint = (se_seeds.powi(2) + i_se.powi(2)).sqrt();
    assert!(
        (averaged - i_mean).abs() < 4.0 * joint,
        "{averaged} vs {i_mean} (se {joint})"
    );
}

#[test]
fn annealed_square_of_sum_is_self_intersection() {
    let law = IncrementLaw::SimpleWalk { dim: 2 };
    let path = sample_path(&law, 1000, &mut Stream::from_seed(41)).unwrap();
    let tab = OccupationTable::accumulate(&path);
    let sceneries = 20_000u64;
    let squares: Vec<f64> = (0..sceneries)
        .map(|s| {
            rwrs_sum(&tab, &SiteField::new(s, 2, SceneryLaw::Rademacher).unwrap())
                .unwrap()
                .powi(2)
        })
        .collect();
    let m = mean(&squares);
    let se = (sample_variance(&squares) / sceneries as f64).sqrt();
    let i2 = tab.self_intersection(2).unwrap() as f64;
    assert!((m - i2).abs() < 4.0 * se, "{m} vs {i2} (se {se})");
}

#[test]
fn annealed_square_of_quenched_mean_is_mean_intersection() {
    let law = renewal();
    let n = 1000usize;
    let table = expected_localtime_renewal(&law, n as u64, DEFAULT_TABLE_BUDGET).unwrap();
    let sceneries = 20_000u64;
    let squares: Vec<f64> = (0..sceneries)
        .map(|s| {
            table
                .quenched_mean(&SiteField::new(s, 1, SceneryLaw::StandardGaussian).unwrap())
                .powi(2)
        })
        .collect();
    let pairs = 5000u64;
    let qs: Vec<f64> = (0..pairs)
        .map(|r| {
            let a = OccupationTable::accumulate(
                &sample_path(&law, n, &mut Stream::new(43, 0, r, 0)).unwrap(),
            );
            let b = OccupationTable::accumulate(
                &sample_path(&law, n, &mut Stream::new(43, 0, r, 1)).unwrap(),
            );
            mutual_intersection(&a, &b, 1, 1).unwrap() as f64
        })
        .collect();
    let (ms, mq) = (mean(&squares), mean(&qs));
    let joint =
        (sample_variance(&squares) / sceneries as f64 + sample_variance(&qs) / pairs as f64).sqrt();
    assert!((ms - mq).abs() < 4.0 * joint, "{ms} vs {mq} (se {joint})");
}

#[test]
fn deterministic_walk_is_degenerate() {
    let law = IncrementLaw::RenewalFinite {
        support: vec![1],
        probs: vec![1.0],
    };
    let spec = QuenchedExperimentSpec::new(Theorem::Renewal, scenery(1..3, 1), law, 200, 50, 1);
    let report = run_quenched(&spec).unwrap();
    assert!(report.degenerate);
    assert!(report.seeds.iter().all(|s| s.variance == 0.0));
}

#[test]
fn recentered_moments_are_bounded_on_real_tables() {
    let law = renewal();
    let n = 3000usize;
    let table = expected_localtime_renewal(&law, n as u64, DEFAULT_TABLE_BUDGET).unwrap();
    for r in 0..50u64 {
        let tab = OccupationTable::accumulate(
            &sample_path(&law, n, &mut Stream::new(47, 0, r, 0)).unwrap(),
        );
        for p in 2..=8u32 {
            let j = recentered_moment(&tab, &table, p).unwrap();
            assert!(
                j.abs() <= 2f64.powi(p as i32 - 1) * 2.0 * n as f64,
                "p={p}: {j}"
            );
        }
    }
}

/// `sum_i Nbar1(i)^k Nbar2(i)^l` for two recentered renewal tables.
fn cross_moment(
    a: &OccupationTable,
    b: &OccupationTable,
    e: &rwrs::ExpectedLocalTimeTable,
    k: i32,
    l: i32,
) -> f64 {
    (1..=e.max_site())
        .map(|i| {
            let site = rwrs::Site::on_axis(0, i);
            (a.count(&site) as f64 - e.get(i)).powi(k) * (b.count(&site) as f64 - e.get(i)).powi(l)
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cross_moments_obey_cauchy_schwarz(seed in any::<u64>(), k in 1u32..=3, l in 1u32..=3) {
        let law = renewal();
        let n = 500usize;
        let e = expected_localtime_renewal(&law, n as u64, DEFAULT_TABLE_BUDGET).unwrap();
        let a = OccupationTable::accumulate(&sample_path(&law, n, &mut Stream::new(seed, 0, 0, 0)).unwrap());
        let b = OccupationTable::accumulate(&sample_path(&law, n, &mut Stream::new(seed, 0, 1, 0)).unwrap());
        let lhs = cross_moment(&a, &b, &e, k as i32, l as i32).abs();
        let rhs = (recentered_moment(&a, &e, 2 * k).unwrap() * recentered_moment(&b, &e, 2 * l).unwrap()).sqrt();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-9);
    }

    #[test]
    fn reports_do_not_depend_on_thread_count(master in any::<u64>(), threads in 2usize..=8) {
        let spec = ExperimentSpec::Quenched(QuenchedExperimentSpec::new(
            Theorem::Transient,
            scenery(1..3, 3),
            IncrementLaw::SimpleWalk { dim: 3 },
            300,
            200,
            master,
        ));
        let mut quenched = match spec { ExperimentSpec::Quenched(q) => q, _ => unreachable!() };
        quenched.gamma.value = Some(0.66);
        let spec = ExperimentSpec::Quenched(quenched);
        let one = run_with_threads(&spec, 1).unwrap();
        let many = run_with_threads(&spec, threads).unwrap();
        prop_assert_eq!(one.body(), many.body());
    }
}

#[test]
fn ks_seed_requirement_never_exceeds_seed_count() {
    let spec =
        QuenchedExperimentSpec::new(Theorem::Renewal, scenery(1..4, 1), renewal(), 300, 1000, 5);
    let report = run_quenched(&spec).unwrap();
    let ks = report.criterion("ks").unwrap();
    assert!(
        ks.tolerance.contains("at least 3 of 3 seeds"),
        "{}",
        ks.tolerance
    );
}
