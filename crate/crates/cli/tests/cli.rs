use std::path::Path;
use std::process::{Command, Output};

fn nhpseudo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhpseudo"))
        .args(args)
        .env("NHPSEUDO_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn small_tls_config(dir: &Path, re_max: f64) -> String {
    let path = dir.join(format!("tls_{re_max}.json"));
    let text = format!(
        r#"{{
  "model": {{ "kind": "tls" }},
  "grid": {{
    "axes": [
      {{ "name": "reE", "min": -1.0, "max": {re_max}, "steps": 5 }},
      {{ "name": "imE", "min": 0.0, "max": 2.0, "steps": 3 }}
    ],
    "fixed": {{ "x": 0.0 }}
  }},
  "gaps": ["q", "linear", "radial"],
  "bounds": ["radial_quadratic"]
}}"#
    );
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn sweep_writes_ordered_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_tls_config(dir.path(), 1.0);
    let out = nhpseudo(&["sweep", &cfg, "-o", "-"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "idx_reE,idx_imE,x,reE,imE,gap_linear,gap_radial,gap_q,radial_quadratic_lhs,radial_quadratic_rhs,radial_quadratic_slack"
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&first[..2], &["0", "0"]);
    assert_eq!(first[3], "-1.0000000000000000e0");
    assert_eq!(text.lines().count(), 16);
}

#[test]
fn gap_prints_json_record() {
    let out = nhpseudo(&["gap", "--model", "tls", "--im", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["gap_q"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(v["site"]["nu"][0][1].as_f64().unwrap(), 1.0);
}

#[test]
fn check_reports_summary_and_succeeds() {
    let out = nhpseudo(&["check", "--seed", "3", "--instances", "4", "--quiet"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("checks=") && text.contains("violations=0"), "{text}");
}

#[test]
fn export_model_writes_interchange_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = nhpseudo(&["export-model", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    for f in ["H.mtx", "X.mtx", "Y.mtx", "sites.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let h = std::fs::read_to_string(dir.path().join("H.mtx")).unwrap();
    assert!(h.starts_with("%%MatrixMarket matrix coordinate complex general\n96 96 "));
}

#[test]
fn file_model_round_trips_exported_matrices() {
    let dir = tempfile::tempdir().unwrap();
    assert!(nhpseudo(&["export-model", "--out", dir.path().to_str().unwrap()]).status.success());
    let cfg = dir.path().join("file.json");
    std::fs::write(
        &cfg,
        r#"{"model":{"kind":"file","h":"H.mtx","positions":["X.mtx","Y.mtx"]},"kappa":0.5,
            "grid":{"axes":[{"name":"x","min":0.25,"max":0.25,"steps":1}],"fixed":{"y":0.25,"reE":0,"imE":0}},
            "gaps":["rq"]}"#,
    )
    .unwrap();
    let out = nhpseudo(&["sweep", cfg.to_str().unwrap(), "-o", "-"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let from_file = String::from_utf8(out.stdout).unwrap();
    let rq_file: f64 = from_file.lines().nth(1).unwrap().split(',').next_back().unwrap().parse().unwrap();

    let g = nhpseudo(&["gap", "--model", "haldane", "--x", "0.25", "--y", "0.25"]);
    let v: serde_json::Value = serde_json::from_slice(&g.stdout).unwrap();
    assert!((v["gap_rq"].as_f64().unwrap() - rq_file).abs() < 1e-12);
}

#[test]
fn diff_appends_column_and_rejects_mismatched_grids() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let cfg_a = small_tls_config(dir.path(), 1.0);
    let cfg_b = small_tls_config(dir.path(), 2.0);
    assert!(nhpseudo(&["sweep", &cfg_a, "-o", a.to_str().unwrap()]).status.success());
    assert!(nhpseudo(&["sweep", &cfg_b, "-o", b.to_str().unwrap()]).status.success());

    let same = nhpseudo(&["diff", a.to_str().unwrap(), a.to_str().unwrap(), "--col-a", "gap_linear", "--col-b", "gap_q"]);
    assert!(same.status.success());
    let text = String::from_utf8(same.stdout).unwrap();
    assert!(text.lines().next().unwrap().ends_with(",absdiff_gap_linear_gap_q"));

    let bad = nhpseudo(&["diff", a.to_str().unwrap(), b.to_str().unwrap(), "--col-a", "gap_q"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("grids differ"));
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"model":{"kind":"tls"},"grid":{"axes":[{"name":"reE","min":0,"max":1,"steps":3}],"fixed":{"x":0,"imE":0}},"gaps":["linear","cubic"]}"#,
    )
    .unwrap();
    let out = nhpseudo(&["sweep", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`gaps[1]`"), "{}", String::from_utf8_lossy(&out.stderr));
}
