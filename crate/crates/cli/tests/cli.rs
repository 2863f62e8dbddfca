//! End-to-end tests of the command-line interface.

use std::fs;
use std::process::Command;

use tempfile::tempdir;

fn heckewalk() -> Command {
    Command::new(env!("CARGO_BIN_EXE_heckewalk"))
}

#[test]
fn theory_prints_oracle_value() {
    let out = heckewalk()
        .args([
            "theory",
            "--name",
            "survival",
            "--params",
            r#"{"k":1,"l":3,"alpha":0.3,"q":0.5}"#,
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value: f64 = text.trim().parse().unwrap();
    assert!((value - 0.12675).abs() < 1e-12);
}

#[test]
fn theory_rejects_unknown_name() {
    let out = heckewalk()
        .args(["theory", "--name", "nonsense", "--params", "{}"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn sample_mallows_streams_and_histograms() {
    let out = heckewalk()
        .args([
            "sample-mallows", "--n", "3", "--q", "0.5", "--trials", "20", "--seed", "5",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 20);
    for line in text.lines() {
        let mut word: Vec<usize> = line
            .split_whitespace()
            .map(|v| v.parse().unwrap())
            .collect();
        word.sort_unstable();
        assert_eq!(word, vec![0, 1, 2]);
    }
    let hist = heckewalk()
        .args([
            "sample-mallows", "--n", "3", "--q", "0.5", "--trials", "200", "--seed", "5",
            "--histogram",
        ])
        .output()
        .unwrap();
    assert!(hist.status.success());
    let text = String::from_utf8(hist.stdout).unwrap();
    assert!(text.starts_with("arrangement,count\n"));
    let total: u64 = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 200);
}

#[test]
fn simulate_qtazrp_writes_jsonl() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"sites": 5, "q": 0.5, "second_class_site": null}"#).unwrap();
    let out_path = dir.path().join("out.jsonl");
    let out = heckewalk()
        .args([
            "simulate", "--model", "qtazrp", "--t-max", "2", "--trials", "3", "--seed", "1",
        ])
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().count(), 3);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("counts").unwrap().is_array());
    }
}

#[test]
fn simulate_six_vertex_writes_lattice_csv() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"a": 2, "b": 4, "rows": 1, "x": 0.5, "q": 0.5}"#).unwrap();
    let out_path = dir.path().join("out.jsonl");
    let csv_path = dir.path().join("lattice.csv");
    let out = heckewalk()
        .args([
            "simulate", "--model", "six-vertex", "--t-max", "0", "--trials", "2", "--seed", "9",
        ])
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_path)
        .arg("--lattice-csv")
        .arg(&csv_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("row,col,in_left,in_right,out_left,out_right\n"));
    assert_eq!(csv.lines().count(), 1 + 4);
}

#[test]
fn experiment_survival_exit_codes_and_determinism() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"k":1,"l":1,"alpha":0.3,"q":0.0,"t":20.0,"window":80,"trials":4000,"seed":21}"#,
    )
    .unwrap();
    let report_a = dir.path().join("a.csv");
    let report_b = dir.path().join("b.csv");
    for path in [&report_a, &report_b] {
        let out = heckewalk()
            .args(["experiment", "--name", "survival"])
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(&report_a).unwrap();
    let b = fs::read(&report_b).unwrap();
    assert_eq!(a, b, "reports are not byte-identical");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("estimate,stderr,trials,discards,theory,zscore,seed\n"));

    // an absurd z bound forces a nonzero exit code
    let out = heckewalk()
        .args(["experiment", "--name", "survival", "--z-bound", "0.000001"])
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("c.csv"))
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn algebra_check_builtin_suite() {
    let out = heckewalk().args(["algebra-check"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn algebra_check_reads_element_json() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("elem.json");
    // Y_{s1, 1/2} on S_3 at q = 1/2
    fs::write(
        &path,
        r#"{
            "family": "A", "rank": 3, "q": "1/2",
            "terms": [
                {"word": [1, 2, 3], "coeff": "1/2"},
                {"word": [2, 1, 3], "coeff": "1/2"}
            ]
        }"#,
    )
    .unwrap();
    let out = heckewalk()
        .args(["algebra-check"])
        .arg("--file")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("stochastic: true"));

    // non-stochastic element: identities hold but exit code is nonzero
    fs::write(
        &path,
        r#"{
            "family": "A", "rank": 3, "q": "1/2",
            "terms": [{"word": [1, 2, 3], "coeff": "2"}]
        }"#,
    )
    .unwrap();
    let out = heckewalk()
        .args(["algebra-check"])
        .arg("--file")
        .arg(&path)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("stochastic: false"));
}
