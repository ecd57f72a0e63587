use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_octa-euler")).args(args).output().expect("spawn")
}

fn summary(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).lines().last().unwrap_or_default().to_string()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn empty_config_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.json");
    std::fs::write(&cfg, "{}").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(summary(&o).contains("status=usage-error"));
    std::fs::write(&cfg, "").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
}

#[test]
fn unknown_flag_and_config_param_are_rejected() {
    assert_eq!(run(&["--bogus"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.json");
    std::fs::write(&cfg, r#"{"subcommand":"blowup-classify","params":{"lamda":1.0}}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(summary(&o).contains("lamda"));
}

#[test]
fn malformed_config_has_its_own_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\"subcommand\": ").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(summary(&o).contains("status=config-error"));
    std::fs::write(&cfg, r#"{"subcommand":"no-such-experiment"}"#).unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["no-such-experiment"]).status.code(), Some(1));
}

#[test]
fn invalid_value_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--out", dir.path().to_str().unwrap(), "flow-map", "--fraction", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn blowup_classify_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--out", dir.path().to_str().unwrap(), "blowup-classify", "--lambda", "1", "--mu", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", summary(&o));
    let rows = csv_rows(&dir.path().join("blowup-classify.csv"));
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!(r[0].parse::<f64>().unwrap(), 1.0);
    assert_eq!(r[1].parse::<f64>().unwrap(), 1.0);
    assert_eq!(&r[2], "true");
    assert_eq!(&r[3], "ThmB-2");
    assert!((r[4].parse::<f64>().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn config_params_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = dir.path().join("c.json");
    let body = serde_json::json!({
        "subcommand": "blowup-classify",
        "params": {"lambda": 0.0, "mu": -1.0},
        "out": out,
    });
    std::fs::write(&cfg, body.to_string()).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", summary(&o));
    let r = &csv_rows(&out.join("blowup-classify.csv"))[0];
    assert_eq!((&r[2], &r[3]), ("true", "remark-axis"));
    let o = run(&["--config", cfg.to_str().unwrap(), "blowup-classify", "--mu", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &csv_rows(&out.join("blowup-classify.csv"))[0];
    assert_eq!(r[1].parse::<f64>().unwrap(), 1.0);
    assert_eq!((&r[2], &r[3]), ("false", "global-decay"));
}

#[test]
fn seeded_output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(&["--seed", "11", "--out", d.path().to_str().unwrap(), "slip-check", "--n-samples", "5"]);
        assert_eq!(o.status.code(), Some(0));
    }
    let fa = std::fs::read(a.path().join("slip-check.csv")).unwrap();
    let fb = std::fs::read(b.path().join("slip-check.csv")).unwrap();
    assert_eq!(fa, fb);
    let c = tempfile::tempdir().unwrap();
    run(&["--seed", "12", "--out", c.path().to_str().unwrap(), "slip-check", "--n-samples", "5"]);
    assert_ne!(fa, std::fs::read(c.path().join("slip-check.csv")).unwrap());
}

#[test]
fn tolerance_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--out", dir.path().to_str().unwrap(), "bc-slope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(summary(&o).contains("status=tolerance-failure"));
    let rows = csv_rows(&dir.path().join("bc-slope.csv"));
    assert!(rows.iter().any(|r| &r[r.len() - 1] == "false"));
}

#[test]
fn group_tables_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--plot", "--out", dir.path().to_str().unwrap(), "group-tables"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_rows(&dir.path().join("group-tables.csv")).len(), 72);
    let o = run(&["--plot", "--out", dir.path().to_str().unwrap(), "blowup-integrate", "--lambda", "2", "--mu", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(dir.path().join("blowup-integrate.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}
