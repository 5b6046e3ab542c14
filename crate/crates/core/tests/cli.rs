//! End-to-end runs of the command line over the files in `examples/data`.

use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples/data")
        .join(name)
        .display()
        .to_string()
}

fn qhl(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = qhl::cli::run(std::iter::once("qhl").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn machine(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "machine"]);
    let (code, out, err) = qhl(&all);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}{err}"));
    (code, v)
}

#[test]
fn dj_constant_one() {
    let (code, v) = machine(&["dj", "--k", "2", "--f", "constant1"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "dj");
    assert_eq!(v["schema_version"], 1);
    assert!((v["results"][0]["p00"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn dj_all_oracles() {
    let (code, v) = machine(&["dj", "--f", "all"]);
    assert_eq!(code, 0);
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 8);
    assert!(results.iter().all(|r| r["correct"] == true));
}

#[test]
fn dj_triple_is_valid() {
    let (dj, uf, i8, t) = (data("dj.qpl"), data("uf_const1.json"), data("I8.mat"), data("T.mat"));
    let (code, v) = machine(&["check", &dj, "--gates", &uf, "--pre", &i8, "--post", &t, "--mode", "tot"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "valid");
    assert!(v["witness"].is_null());
}

#[test]
fn flip_triple_is_invalid_with_witness() {
    let (flip, i, zero) = (data("flip.qpl"), data("I.mat"), data("zero.mat"));
    let (code, out, _) = qhl(&["check", &flip, "--pre", &i, "--post", &zero, "--mode", "tot"]);
    assert_eq!(code, 1);
    assert!(out.contains("invalid") && out.contains("witness"));
    let (code, v) = machine(&["check", &flip, "--pre", &i, "--post", &zero, "--mode", "tot"]);
    assert_eq!(code, 1);
    let doc: qhl::linalg::exchange::MatrixDoc = serde_json::from_value(v["witness"].clone()).unwrap();
    let w = doc.to_matrix().unwrap();
    assert!((w[(0, 0)].re - 1.0).abs() < 1e-9);
    assert!((v["violation"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn partial_mode_accepts_divergence() {
    let (p, one) = (data("diverge.qpl"), data("one.mat"));
    assert_eq!(qhl(&["check", &p, "--pre", &one, "--post", "0", "--mode", "par"]).0, 0);
    assert_eq!(qhl(&["check", &p, "--pre", &one, "--post", "0", "--mode", "tot"]).0, 1);
    // from |0⟩ the loop exits at once, so 0 fails even partially
    assert_eq!(qhl(&["check", &p, "--pre", "I", "--post", "0", "--mode", "par"]).0, 1);
}

#[test]
fn run_reports_state_and_termination() {
    let (code, v) = machine(&["run", &data("coin.qpl")]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "run");
    assert!((v["termination_probability"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    let (code, v) = machine(&["run", &data("diverge.qpl"), "--rho", &data("one.mat")]);
    assert_eq!(code, 0);
    assert_eq!(v["termination_probability"].as_f64().unwrap(), 0.0);
    let (code, out, _) = qhl(&["run", &data("dj_qpl.qpl"), "--gates", &data("uf_const1.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("b1: bit") && out.contains("termination_probability: 1.0"));
}

#[test]
fn wp_and_wlp() {
    let (code, v) = machine(&["wp", &data("flip.qpl"), "--post", &data("zero.mat")]);
    assert_eq!(code, 0);
    assert_eq!(v["predicate"]["re"][1][1].as_f64().unwrap(), 1.0);
    let (code, out, _) = qhl(&["wlp", &data("diverge.qpl"), "--post", "0"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("wlp:\n  [0  0]\n  [0  1]\n"), "{out}");
}

#[test]
fn prove_outlines() {
    assert_eq!(qhl(&["prove", &data("dj_outline.json")]).0, 0);
    let (code, v) = machine(&["prove", &data("coin_outline.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["steps"].as_array().unwrap().len(), 3);
    let (code, out, _) = qhl(&["prove", &data("flip_outline_bad.json")]);
    assert_eq!(code, 1);
    assert!(out.contains("FAILED"));
}

#[test]
fn assertions() {
    let (dj, uf) = (data("dj.qpl"), data("uf_const1.json"));
    let (code, _, _) = qhl(&["assert", &dj, "--gates", &uf, "--expr", "Pr(q1=0 & q2=0) = 1"]);
    assert_eq!(code, 0);
    let (code, v) = machine(&["assert", &dj, "--gates", &uf, "--expr", "Pr(q1=1) >= 0.5"]);
    assert_eq!(code, 1);
    assert_eq!(v["holds"], false);
    let (code, _, _) = qhl(&["assert", &data("flip.qpl"), "--rho", &data("plus.mat"), "--expr", "Pr(q=0) = 0.5"]);
    assert_eq!(code, 0);
}

#[test]
fn inconclusive_exits_three() {
    let coin = data("coin.qpl");
    assert_eq!(qhl(&["run", &coin, "--exact-loops", "--loop-max-iters", "5"]).0, 3);
    assert_eq!(qhl(&["wp", &coin, "--post", "I", "--fix-max-iters", "3"]).0, 3);
    assert_eq!(qhl(&["check", &coin, "--pre", "I", "--post", "I", "--fix-max-iters", "3"]).0, 3);
}

#[test]
fn malformed_input_exits_two() {
    let flip = data("flip.qpl");
    assert_eq!(qhl(&["run", &data("missing.qpl")]).0, 2);
    assert_eq!(qhl(&["check", &flip, "--pre", &data("I8.mat"), "--post", "I"]).0, 2);
    assert_eq!(qhl(&["run", &data("dj.qpl")]).0, 2, "Uf is unknown without its sidecar");
    assert_eq!(qhl(&["run", &data("dj_qpl.qpl"), "--dialect", "ying-core", "--gates", &data("uf_const1.json")]).0, 2);
    assert_eq!(qhl(&["dj", "--f", "balanced:0001"]).0, 2);
    assert_eq!(qhl(&["run", &flip, "--tol", "0"]).0, 2);
    let (code, _, err) = qhl(&["wp", &flip]);
    assert_eq!(code, 2);
    assert!(err.contains("--post"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let p = path.display().to_string();
    let (code, out, _) = qhl(&["dj", "--f", "constant0", "--format", "machine", "--out", &p]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "dj");
}

#[test]
fn machine_output_is_byte_identical_across_runs() {
    let args = ["wp", &data("coin.qpl"), "--post", &data("zero.mat"), "--format", "machine"].map(String::from);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    assert_eq!(qhl(&args).1, qhl(&args).1);
}

#[test]
fn binary_honours_env_tolerance() {
    let bin = env!("CARGO_BIN_EXE_qhl");
    let ok = Command::new(bin).args(["dj", "--f", "constant1"]).env("QHL_TOL", "1e-6").output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["dj", "--f", "constant1"]).env("QHL_TOL", "-3").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}
