use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use cyclescope::report::read_series_file;
use cyclescope::synth::oracle::dense_hp_trend;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cyclescope"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("spawn cyclescope")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_csv(dir: &Path, name: &str, rows: &[(&str, f64)]) -> PathBuf {
    let mut text = String::from("date,value\n");
    for (d, v) in rows {
        text.push_str(&format!("{d},{v}\n"));
    }
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn analyze_writes_report_and_plots() {
    let out = tempfile::tempdir().unwrap();
    let o = run(bin()
        .arg("analyze")
        .arg(fixtures().join("fixture.csv"))
        .arg("--out")
        .arg(out.path()));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&out.path().join("report.json"));
    for key in ["stages", "scan", "intervals", "cycles", "hp", "turning_points", "provenance", "manifest"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    for key in ["psi", "period_months", "period_years", "coeff_filtered", "coeff_original", "amplitude"] {
        assert!(report["cycles"][0].get(key).is_some(), "cycle missing {key}");
    }
    assert!(report["hp"][0].get("cutoff_months").is_some());
    assert_eq!(report["manifest"]["command"], "analyze");
    assert_eq!(report["provenance"]["block_length"], 32);

    let scan = fs::read_to_string(out.path().join("scan.csv")).unwrap();
    assert!(scan.starts_with("psi,period_months,statistic,critical_0.92,critical_0.95,critical_0.99,flag_0.92"));
    assert_eq!(scan.lines().count(), 81);
    let cycles = fs::read_to_string(out.path().join("hp_cycles.csv")).unwrap();
    assert!(cycles.starts_with("date,cycle_5500,cycle_12000,cycle_32000,cycle_55000\n"));
    assert!(out.path().join("stages.csv").exists());
    assert!(String::from_utf8_lossy(&o.stdout).contains("3 flagged interval(s)"));
}

#[test]
fn analyze_options_reach_the_config() {
    let out = tempfile::tempdir().unwrap();
    let o = run(bin()
        .arg("analyze")
        .arg(fixtures().join("fixture.csv"))
        .args(["--no-log", "--p", "2", "--gammas", "0.9,0.99", "--b", "20", "--lambda", "1600", "--out"])
        .arg(out.path()));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let config = &json(&out.path().join("report.json"))["provenance"]["config"];
    assert_eq!(config["log_transform"], false);
    assert_eq!(config["trend_order"], 2);
    assert_eq!(config["b_override"], 20);
    assert_eq!(config["gammas"], serde_json::json!([0.9, 0.99]));
    assert_eq!(config["lambdas"], serde_json::json!([1600.0]));
}

#[test]
fn input_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let gap = write_csv(dir.path(), "gap.csv", &[("2001-01", 1.0), ("2001-02", 1.0), ("2001-04", 1.0)]);
    let o = run(bin().arg("analyze").arg(&gap).arg("--out").arg(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4") && err.contains("2001-03"), "{err}");

    let rows: Vec<(String, f64)> = (0..60).map(|k| (format!("{}-{:02}", 2000 + k / 12, k % 12 + 1), 1.0 - (k == 5) as i32 as f64)).collect();
    let rows: Vec<(&str, f64)> = rows.iter().map(|(d, v)| (d.as_str(), *v)).collect();
    let zero = write_csv(dir.path(), "zero.csv", &rows);
    let o = run(bin().arg("analyze").arg(&zero).arg("--out").arg(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("non-positive"));

    let short = write_csv(dir.path(), "short.csv", &rows[..30]);
    let o = run(bin().arg("analyze").arg(&short).arg("--no-log").arg("--out").arg(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("too short"));

    let o = run(bin().arg("analyze").arg(dir.path().join("absent.csv")));
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn simulate_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = run(bin()
            .arg("simulate")
            .arg(fixtures().join("fixture_spec.json"))
            .args(["--n", "1800", "--seed", "99", "--out"])
            .arg(dir.path()));
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["series.csv", "truth.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let series = read_series_file(&a.path().join("series.csv")).unwrap();
    assert_eq!(series.len(), 1800);
    let truth = json(&a.path().join("truth.json"));
    assert_eq!(truth["harmonics"].as_array().unwrap().len(), 3);
    assert_eq!(truth["manifest"]["seed"], 99);
}

#[test]
fn bundled_fixture_matches_its_spec() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin()
        .arg("simulate")
        .arg(fixtures().join("fixture_spec.json"))
        .args(["--n", "180", "--start", "1995-01", "--out"])
        .arg(dir.path()));
    assert!(o.status.success());
    assert_eq!(
        fs::read(dir.path().join("series.csv")).unwrap(),
        fs::read(fixtures().join("fixture.csv")).unwrap()
    );
}

#[test]
fn filter_decomposes_for_each_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin()
        .arg("filter")
        .arg(fixtures().join("fixture.csv"))
        .args(["--lambda", "0", "1600", "--out"])
        .arg(dir.path()));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("decomposition.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("date,input,trend_0,cycle_0,trend_1600,cycle_1600"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').skip(1).map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 180);
    let input: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let dense = dense_hp_trend(&input, 1600.0);
    for (r, d) in rows.iter().zip(&dense) {
        assert_eq!(r[1], r[0]);
        assert_eq!(r[2], 0.0);
        assert!((r[3] - d).abs() < 1e-8 * d.abs().max(1.0));
    }
}

#[test]
fn validate_fast_checks_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin().args(["validate", "--out"]).arg(dir.path()));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("PASS") && !stdout.contains("FAIL"));
    assert_eq!(json(&dir.path().join("validation.json"))["passed"], true);
}

#[test]
fn usage_errors_exit_with_code_two() {
    let o = run(bin().args(["analyze", "x.csv", "--p", "notanumber"]));
    assert_eq!(o.status.code(), Some(2));
    let o = run(bin().args(["filter", "x.csv"]));
    assert_eq!(o.status.code(), Some(2));
}
