use std::path::Path;
use std::process::{Command, Output};

fn kappa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kappa")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn predict_in_every_format() {
    let text = kappa(&["predict"]);
    assert!(text.status.success());
    let t = stdout(&text);
    assert!(t.lines().next().unwrap().starts_with("case"));
    assert_eq!(t.lines().count(), 10);

    let csv = stdout(&kappa(&["predict", "--format", "csv"]));
    assert_eq!(csv.lines().next().unwrap(), "case,variant,d,a,kappa,theta_source");
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let kappas: Vec<String> = reader.records().map(|r| r.unwrap()[4].to_string()).collect();
    assert_eq!(kappas, ["1", "1", "5", "4/3", "9/4", "9/4", "18", "12", "4/3"]);

    let json: serde_json::Value = serde_json::from_str(&stdout(&kappa(&["predict", "--format", "json"]))).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 9);
    assert_eq!(json[3]["kappa"], "4/3");

    let variants: serde_json::Value =
        serde_json::from_str(&stdout(&kappa(&["predict", "--variants", "--format", "json"]))).unwrap();
    assert!(variants.as_array().unwrap().len() > 9);
}

#[test]
fn certify_emits_json() {
    let out = kappa(&["certify", "--case", "gaussian-sl2", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v[0]["tempered"], true);
    assert_eq!(v[0]["theta"], 0.5);
    let all: serde_json::Value = serde_json::from_str(&stdout(&kappa(&["certify", "--format", "json"]))).unwrap();
    assert!(all.as_array().unwrap().iter().any(|c| c["method"] == "Unknown"));
}

#[test]
fn bad_inputs_exit_with_one() {
    assert_eq!(kappa(&["estimate", "--space", "nope"]).status.code(), Some(1));
    assert_eq!(kappa(&["certify", "--case", "nope"]).status.code(), Some(1));
    assert_eq!(kappa(&["predict", "--no-such-flag"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"space": "real-plane-affine", "t_grid": [2, 4], "bogus": true}"#).unwrap();
    assert_eq!(kappa(&["estimate", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

fn write_config(path: &Path, tolerance: f64) {
    let cfg = serde_json::json!({
        "space": "real-plane-affine",
        "t_grid": [2, 4, 8, 16, 32, 64, 128],
        "pairs": 3,
        "seed": 7,
        "tolerance": tolerance,
        "pair_tolerance": tolerance,
        "min_pair_fraction": 0.0,
    });
    std::fs::write(path, cfg.to_string()).unwrap();
}

#[test]
fn estimate_writes_report_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    write_config(&cfg, 10.0);
    let out_dir = dir.path().join("out");
    let out = kappa(&["estimate", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pairs"].as_array().unwrap().len(), 3);
    assert_eq!(report["config"]["seed"], 7);
    let curves = std::fs::read_to_string(out_dir.join("curves.csv")).unwrap();
    assert_eq!(curves.lines().next().unwrap(), "pair_id,T,epsilon,gamma_norm,gamma_entries");
    assert_eq!(curves.lines().count(), 1 + 3 * 7);

    let csv = stdout(&kappa(&["estimate", "--config", cfg.to_str().unwrap(), "--format", "csv"]));
    assert_eq!(csv, curves);
}

#[test]
fn impossible_tolerance_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    write_config(&cfg, 0.0);
    let out = kappa(&["estimate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn count_reports_a_slope() {
    let out = kappa(&["count", "--t-lo", "3", "--t-hi", "6"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("slope"));
}
