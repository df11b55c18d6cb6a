//! The `rwrs` binary: exit codes, report files and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn rwrs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rwrs"))
        .args(args)
        .env_remove("RWRS_THREADS")
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

const SMALL_RENEWAL: &str = r#"
[scenery]
law = "rademacher"
seeds = [1, 2]
dim = 1

[walk]
variant = "renewal"
support = [1, 2]
probs = [0.5, 0.5]

[experiment]
theorem = "renewal"
n = 500
M = 2000

[execution]
master_seed = 3
"#;

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("config.toml");
    std::fs::write(&p, body).unwrap();
    p
}

fn report_body(dir: &Path) -> Value {
    let mut v: Value =
        serde_json::from_slice(&std::fs::read(dir.join("report.json")).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("meta");
    v
}

#[test]
fn validate_accepts_reference_configs() {
    for name in [
        "renewal.toml",
        "planar.toml",
        "transient.toml",
        "transient_stable.toml",
    ] {
        let out = rwrs(&["validate", "--config", config(name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", text(&out.stderr));
        assert!(text(&out.stdout).contains("admissible"));
    }
}

#[test]
fn validate_rejects_periodic_support() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        &SMALL_RENEWAL.replace("support = [1, 2]", "support = [2, 4]"),
    );
    let out = rwrs(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let all = text(&out.stdout) + &text(&out.stderr);
    assert!(all.contains("aperiodic"), "{all}");
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        &SMALL_RENEWAL.replace("M = 2000", "smaples = 2000"),
    );
    let out = rwrs(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    assert!(err.contains("smaples") && err.contains("line"), "{err}");
}

#[test]
fn run_writes_reports_and_threads_do_not_matter() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), SMALL_RENEWAL);
    let mut bodies = Vec::new();
    for threads in ["1", "8"] {
        let outdir = dir.path().join(format!("out{threads}"));
        let out = rwrs(&[
            "run",
            "--config",
            path.to_str().unwrap(),
            "--override",
            &format!("execution.threads={threads}"),
            "--output",
            outdir.to_str().unwrap(),
        ]);
        assert!(
            matches!(out.status.code(), Some(0 | 1)),
            "{}",
            text(&out.stderr)
        );
        for f in ["report.json", "summary.csv", "ecdf.csv"] {
            assert!(outdir.join(f).exists(), "{f} missing");
        }
        let ecdf = std::fs::read_to_string(outdir.join("ecdf.csv")).unwrap();
        assert!(ecdf.starts_with("sample_value,empirical_cdf,target_normal_cdf"));
        let summary = std::fs::read_to_string(outdir.join("summary.csv")).unwrap();
        assert!(summary.starts_with("experiment,group,horizon,quantity,value,target,stderr"));
        let body = report_body(&outdir);
        assert_eq!(body["v"], 1);
        bodies.push(body);
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn threads_flag_and_env_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), SMALL_RENEWAL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    rwrs(&[
        "--threads",
        "2",
        "run",
        "--config",
        path.to_str().unwrap(),
        "--output",
        a.to_str().unwrap(),
    ]);
    Command::new(env!("CARGO_BIN_EXE_rwrs"))
        .args([
            "run",
            "--config",
            path.to_str().unwrap(),
            "--output",
            b.to_str().unwrap(),
        ])
        .env("RWRS_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(report_body(&a), report_body(&b));
}

#[test]
fn renewal_reference_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = rwrs(&[
        "run",
        "--config",
        config("renewal.toml").to_str().unwrap(),
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}{}",
        text(&out.stdout),
        text(&out.stderr)
    );
    let stdout = text(&out.stdout);
    assert!(
        stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 3,
        "{stdout}"
    );
    let mut rdr = csv::Reader::from_path(dir.path().join("summary.csv")).unwrap();
    let variances: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap())
        .filter(|r| &r[3] == "variance")
        .map(|r| r[4].parse().unwrap())
        .collect();
    assert_eq!(variances.len(), 5);
    assert!(
        variances.iter().all(|v| (v - 1.0 / 3.0).abs() < 0.03),
        "{variances:?}"
    );
}

#[test]
fn tiny_sample_count_is_underpowered_not_failed() {
    let dir = tempfile::tempdir().unwrap();
    let out = rwrs(&[
        "run",
        "--config",
        config("renewal.toml").to_str().unwrap(),
        "--override",
        "experiment.M=10",
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).contains("underpowered"));
    let body = report_body(dir.path());
    assert_eq!(body["underpowered"], true);
    assert!(body["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["low_power"] == true));
}

#[test]
fn over_budget_table_is_a_resource_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        &SMALL_RENEWAL.replace("n = 500", "n = 200000000"),
    );
    let out = rwrs(&[
        "run",
        "--config",
        path.to_str().unwrap(),
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", text(&out.stderr));
    assert!(text(&out.stderr).contains("monte_carlo"));
}

#[test]
fn intersections_refuses_theorem_configs() {
    let out = rwrs(&[
        "intersections",
        "--config",
        config("renewal.toml").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gamma_of_renewal_walk_is_one() {
    let out = rwrs(&[
        "gamma",
        "--walk",
        "renewal",
        "--support",
        "1,2",
        "--probs",
        "0.5,0.5",
        "-T",
        "1000",
        "-M",
        "200",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["estimate"]["estimate"], 1.0);
}

#[test]
fn gamma_of_cubic_walk() {
    let out = rwrs(&[
        "gamma", "--walk", "simple", "--dim", "3", "-T", "100000", "-M", "10000", "--double",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let g = v["estimate"]["estimate"].as_f64().unwrap();
    assert!((0.64..=0.68).contains(&g), "{g}");
    assert!(v["stability_delta"].is_number());
    assert_eq!(v["doubled"]["horizon"], 200_000);
}

#[test]
fn gamma_reads_walk_from_config() {
    let out = rwrs(&[
        "gamma",
        "--config",
        config("renewal.toml").to_str().unwrap(),
        "-T",
        "100",
        "-M",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["estimate"]["estimate"], 1.0);
}
