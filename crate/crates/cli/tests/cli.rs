use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use warpforce::verify::BoundReport;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpforce"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn reports(out: &Path) -> Vec<BoundReport> {
    serde_json::from_str(&std::fs::read_to_string(out.join("reports.json")).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<std::collections::HashMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            headers.iter().map(String::from).zip(rec.iter().map(String::from)).collect()
        })
        .collect()
}

#[test]
fn half_line_check_reports_constant_and_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "lemma2.1", "--t0", "3"]);
    let rs = reports(dir.path());
    assert_eq!(rs.len(), 1);
    assert!((rs[0].rhs - 0.0128895).abs() < 1e-7);
    assert_eq!(rs[0].params["t0"], 3.0);
    let expected = if rs[0].pass { 0 } else { 1 };
    assert_eq!(o.status.code(), Some(expected));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("name,params,lhs,rhs,margin,pass,marginal,degenerate,error\nlemma2.1,t0=3,"));
}

#[test]
fn precondition_violation_names_the_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "lemma2.1", "--t0", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("t0") && err.contains("t0 > 2"), "{err}");
    let o = run(dir.path(), &["verify", "lemma4.4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown check"));
}

#[test]
fn negative_shift_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["verify", "lemma2.3", "--s", "-0.5", "--t0", "4", "--xi", "1", "--instances", "2", "--grid", "16"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let rs = reports(dir.path());
    assert_eq!(rs.len(), 6);
    assert!(rs.iter().all(|r| r.params["s"] == -0.5 && r.pass));
}

#[test]
fn identical_seed_gives_identical_csv() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["verify", "lemma1.1", "--instances", "6", "--grid", "16", "--seed", "11"];
    run(a.path(), &args);
    run(b.path(), &args);
    let mut other = args;
    other[7] = "12";
    run(c.path(), &other);
    let read = |d: &Path| std::fs::read(d.join("summary.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_ne!(read(a.path()), read(c.path()));
    let serial = tempfile::tempdir().unwrap();
    let mut args_serial = args.to_vec();
    args_serial.push("--serial");
    run(serial.path(), &args_serial);
    assert_eq!(read(a.path()), read(serial.path()));
}

#[test]
fn json_flag_prints_report_array() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "bump", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let rs: Vec<BoundReport> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rs.len(), 1);
    assert!(rs[0].lhs < 48.0 && rs[0].rhs == 48.0);
}

#[test]
fn full_suite_fails_only_on_the_half_line_constant() {
    let dir = tempfile::tempdir().unwrap();
    let config = configs().join("default.json");
    let o = run(dir.path(), &["verify", "all", "--config", config.to_str().unwrap()]);
    let rs = reports(dir.path());
    let failing: Vec<&str> = rs.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    assert!(failing.iter().all(|n| *n == "lemma2.1"), "{failing:?}");
    for r in &rs {
        assert!(r.is_consistent(), "{r:?}");
    }
    assert_eq!(o.status.code(), Some(if failing.is_empty() { 0 } else { 1 }));
    for name in ["lemma2.2", "lemma2.3(1)", "lemma2.3(2)", "lemma3.1", "lemma3.2", "lemma1.1"] {
        assert!(rs.iter().filter(|r| r.name == name).count() >= 200, "{name}");
    }
}

#[test]
fn fixed_point_theorem_has_eta_equal_to_eps() {
    let dir = tempfile::tempdir().unwrap();
    let config = configs().join("fixed_point.json");
    let o = run(dir.path(), &["theorem", "--config", config.to_str().unwrap(), "--grid", "24"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("centers.csv"));
    assert_eq!(rows.len(), 2 * 12);
    for r in rows {
        let eta: f64 = r["eta"].parse().unwrap();
        let eps: f64 = r["eps_restricted"].parse().unwrap();
        assert!((eta - eps).abs() <= 1e-12 * eps.max(1.0), "{r:?}");
        assert_eq!(r["chart_excess"], "0.5");
    }
}

#[test]
fn radius_sweep_stays_below_bound() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["theorem", "--r0", "4,5,6,7", "--per-zone", "2", "--grid", "24"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("sweep.csv"));
    assert_eq!(rows.len(), 4);
    for r in rows {
        let (eta, bound): (f64, f64) = (r["eta"].parse().unwrap(), r["eta_bound"].parse().unwrap());
        assert!(eta < bound);
    }
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.starts_with("r0,xi,eps,eta,eta_bound,ratio,pass"));
}

#[test]
fn theorem_config_without_manifold_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"r0": [5], "xi": 1.5, "centers": {"kind": "zones", "per_zone": 1}}"#).unwrap();
    let o = run(dir.path(), &["theorem", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("manifold"));
}

#[test]
fn remark_table_contrast() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["demo-remark"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("remark.csv"));
    let eps: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r["t0"].parse().unwrap(), r["eps"].parse().unwrap()))
        .collect();
    assert!(eps.windows(2).all(|w| w[1].1 < w[0].1));
    let at = |t: f64| eps.iter().find(|e| e.0 == t).unwrap().1;
    assert!(at(2.2) > 100.0 * at(8.0));
    assert!(at(8.0) < 1e-3);
}

#[test]
fn dump_grid_writes_model_components() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["dump-grid", "--what", "model", "--grid", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("grid.csv"));
    assert_eq!(rows.len(), 64);
    for r in rows {
        let t: f64 = r["t"].parse().unwrap();
        let g11: f64 = r["g11"].parse().unwrap();
        assert!((g11 - (2.0 * t).exp()).abs() < 1e-12 * g11);
        assert_eq!(r["g22"], "1e0");
    }
}
