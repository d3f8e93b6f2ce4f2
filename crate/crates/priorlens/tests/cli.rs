//! End-to-end tests of the `priorlens` binary: argument handling, exit
//! codes, file formats, determinism, and the sample -> analyze pipeline.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_priorlens"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn priorlens")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

/// Data rows of a CSV body, skipping '#' comments and the header line.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn sample_outputs_replay_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        vec![
            "sample".to_string(),
            "--n".into(),
            "4".into(),
            "--samples".into(),
            "4000".into(),
            "--seed".into(),
            "77".into(),
            "--shards".into(),
            "4".into(),
            "--out".into(),
            out.display().to_string(),
        ]
    };
    let first = bin().args(args(dir_a.path())).output().unwrap();
    let summary = stdout_of(&first);
    assert!(summary.contains("distinct"), "summary line: {summary}");
    let second = bin().args(args(dir_b.path())).output().unwrap();
    stdout_of(&second);
    for name in ["campaign.json", "t_hist.csv", "rank.csv", "patterns.csv"] {
        let a = fs::read(dir_a.path().join(name)).unwrap();
        let b = fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn thread_cap_rewrites_shards() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "sample",
            "--n",
            "3",
            "--samples",
            "1000",
            "--seed",
            "9",
            "--shards",
            "8",
            "--out",
        ])
        .arg(dir.path())
        .env("PRIORLENS_THREADS", "2")
        .output()
        .unwrap();
    stdout_of(&out);
    let text = fs::read_to_string(dir.path().join("campaign.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["shards"], serde_json::json!(2));
}

#[test]
fn missing_required_flag_exits_2() {
    let out = run(&["sample", "--n", "4", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--seed"), "stderr: {err}");
}

#[test]
fn out_of_domain_argument_exits_2() {
    let out = run(&["analyze", "conditions", "--n", "9", "--t", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_file_exits_3() {
    let out = run(&["analyze", "zipf", "--in", "/nonexistent/rank.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn underpopulated_fit_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rank.csv");
    let mut text = String::from("rank,probability\n");
    for r in 1..=5u32 {
        text.push_str(&format!("{r},{}\n", 0.1 / f64::from(r)));
    }
    fs::write(&path, text).unwrap();
    let out = run(&["analyze", "zipf", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("10"), "stderr: {err}");
}

#[test]
fn config_defaults_yield_to_explicit_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("defaults.cfg");
    fs::write(&cfg, "# shared defaults\nn=4\n").unwrap();

    let from_config = run(&["analyze", "laws", "--config", cfg.to_str().unwrap()]);
    let rows = csv_rows(&stdout_of(&from_config));
    assert_eq!(rows.len(), 17, "2^4 + 1 bins when the config supplies n");

    let overridden =
        run(&["analyze", "laws", "--config", cfg.to_str().unwrap(), "--n", "3"]);
    let rows = csv_rows(&stdout_of(&overridden));
    assert_eq!(rows.len(), 9, "an explicit --n must beat the config default");
}

#[test]
fn laws_csv_matches_library_values() {
    let out = run(&["analyze", "laws", "--n", "4", "--law", "infinitesimal-bias"]);
    let rows = csv_rows(&stdout_of(&out));
    let expect = priorlens::analytic::infinitesimal_bias_law(4).unwrap();
    assert_eq!(rows.len(), expect.len());
    for (row, want) in rows.iter().zip(&expect) {
        let got: f64 = row[1].parse().unwrap();
        assert!((got - want).abs() <= 1e-11 * want.max(1e-300), "{row:?} vs {want}");
    }
}

#[test]
fn oracle_census_totals_are_exact() {
    let out = run(&["analyze", "oracle", "--n", "3"]);
    let text = stdout_of(&out);
    assert!(text.contains("# total: 32"), "body: {text}");
    let rows = csv_rows(&text);
    let total: u64 = rows.iter().map(|r| r[1].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 32);
    assert_eq!(rows.len(), 8, "classes t = 0..=7 are all realizable");
}

#[test]
fn expressivity_writes_verifiable_network_json() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("net.json");
    let out = run(&[
        "analyze",
        "expressivity",
        "--pattern",
        "01101001",
        "--n",
        "3",
        "--layers",
        "2",
        "--out",
        net.to_str().unwrap(),
    ]);
    let text = stdout_of(&out);
    assert!(text.contains("verified"), "stdout: {text}");
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&net).unwrap()).unwrap();
    for key in ["widths", "activation", "weights", "biases", "meta"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["widths"][0], serde_json::json!(3));
}

#[test]
fn sample_then_zipf_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "sample",
            "--n",
            "4",
            "--dist",
            "uniform",
            "--samples",
            "20000",
            "--seed",
            "5",
            "--shards",
            "4",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    stdout_of(&out);
    let rank = dir.path().join("rank.csv");
    let fit_path = dir.path().join("fit.json");
    let fit_run = run(&[
        "analyze",
        "zipf",
        "--in",
        rank.to_str().unwrap(),
        "--out",
        fit_path.to_str().unwrap(),
    ]);
    stdout_of(&fit_run);
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&fit_path).unwrap()).unwrap();
    let slope = v["slope"].as_f64().unwrap();
    assert!(slope.is_finite() && slope < 0.0, "slope: {slope}");
    assert!(v["ranks_used"].as_u64().unwrap() >= 10);
    assert!(v["n_o"].as_f64().unwrap() > 0.0);
}

#[test]
fn stdout_is_bare_but_files_carry_metadata() {
    let to_stdout = run(&["analyze", "laws", "--n", "3"]);
    let text = stdout_of(&to_stdout);
    assert!(text.starts_with("t,probability\n"), "stdout body: {text}");
    assert!(!text.contains('#'), "stdout must stay pipe-friendly");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("laws.csv");
    let to_file = run(&["analyze", "laws", "--n", "3", "--out", path.to_str().unwrap()]);
    stdout_of(&to_file);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# version: priorlens"), "file: {text}");
    assert!(text.contains("# spec: analyze laws"), "file: {text}");
    assert!(text.contains("t,probability\n"));
}

#[test]
fn conditions_json_has_the_tree_shape() {
    let out = run(&["analyze", "conditions", "--n", "5", "--t", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["n"], serde_json::json!(5));
    assert_eq!(v["t"], serde_json::json!(4));
    assert!(v["tree"].is_object());
    fn walk(node: &serde_json::Value) -> usize {
        if let Some(sig) = node.get("signature") {
            assert!(sig.as_str().unwrap().chars().all(|c| c == '+' || c == '-'));
            1
        } else {
            assert!(node.get("condition").is_some());
            walk(&node["if_true"]) + walk(&node["if_false"])
        }
    }
    assert!(walk(&v["tree"]) >= 1);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["analyze", "gp-depth", "--help"]).status.code(), Some(0));
    let unknown = run(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(2));
}
