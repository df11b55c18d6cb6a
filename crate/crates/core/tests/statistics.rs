//! Goodness-of-fit and moment estimators on exact normal draws.

use rwrs::limits::gaussian_moment;
use rwrs::rng::Stream;
use rwrs::stats::{empirical_moments, ks_normal};

fn normals(seed: u64, n: usize, scale: f64) -> Vec<f64> {
    let mut rng = Stream::from_seed(seed);
    (0..n).map(|_| scale * rng.standard_normal()).collect()
}

#[test]
fn ks_accepts_its_own_normals() {
    let passes = (0..100u64)
        .filter(|&r| {
            ks_normal(&normals(1000 + r, 10_000, 1.0), 1.0)
                .unwrap()
                .p_value
                > 0.001
        })
        .count();
    assert!(passes >= 99, "{passes} of 100");
}

#[test]
fn ks_rejects_wrong_variance() {
    let r = ks_normal(&normals(5, 10_000, 1.0), 4.0).unwrap();
    assert!(r.p_value < 1e-6, "{r:?}");
}

#[test]
fn ks_flags_constant_samples() {
    let r = ks_normal(&[0.3; 50], 1.0).unwrap();
    assert!(r.degenerate);
    assert!(r.statistic > 0.99);
    assert!(r.p_value < 1e-6);
}

#[test]
fn two_point_moments() {
    let m = empirical_moments(&[-1.0, 1.0], 4, 1.0);
    let get = |k: u32| m.iter().find(|e| e.order == k).unwrap();
    assert_eq!(get(1).empirical, 0.0);
    assert_eq!(get(2).empirical, 1.0);
    assert_eq!(gaussian_moment(6, 1.0), 15.0);
}

#[test]
fn fourth_moment_of_normals() {
    let m = empirical_moments(&normals(9, 100_000, 1.0), 4, 1.0);
    let m4 = m.iter().find(|e| e.order == 4).unwrap();
    assert_eq!(m4.target, 3.0);
    assert!((m4.empirical - 3.0).abs() < 4.0 * m4.stderr, "{m4:?}");
}
