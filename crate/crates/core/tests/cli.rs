use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use siegel_bergman::DiagnosticsReport;

const I: &str = r#"{"zprime":[],"zn":[0,1]}"#;
const TWO_I: &str = r#"{"zprime":[],"zn":[0,2]}"#;
const ATOM: &str = r#"{"type":"atomic","dim":1,"atoms":[{"point":{"zprime":[],"zn":[0,1]},"weight":1}]}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_siegel-bergman"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["metric"][..],
        &["metric", "--from", I],
        &["verify", "--bogus"],
        &["diagnose", "--measure", "m.json", "--csv", "--format", "json"],
        &["berezin", "--measure", ATOM, "--z", I, "--samples", "0"],
        &["nonsense"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn bad_inputs_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"type":"atomic","dim":1,"atom":[]}"#);
    let out = run(&["diagnose", "--measure", &bad]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema error"));

    let missing = dir.path().join("missing.json");
    let out = run(&["diagnose", "--measure", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));

    let out = run(&["metric", "--from", I, "--to", r#"{"zprime":[],"zn":[0,-1]}"#]);
    assert_eq!(out.status.code(), Some(3));

    let unwritable = dir.path().join("no/such/dir/out.json");
    let out = run(&["metric", "--from", I, "--to", TWO_I, "--out", unwritable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn kernel_and_metric_values() {
    let out = run(&["kernel", "--z", I, "--w", TWO_I]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let k = v["kernel"][0].as_f64().unwrap();
    assert!((k - 1.0 / (9.0 * std::f64::consts::PI)).abs() < 1e-16);
    assert_eq!(v["kernel"][1].as_f64().unwrap(), 0.0);
    let norm = v["kernel_norm"].as_f64().unwrap();
    assert!((norm - 0.5 / std::f64::consts::PI.sqrt()).abs() < 1e-15);

    let out = run(&["metric", "--from", I, "--to", TWO_I]);
    assert_eq!(out.status.code(), Some(0));
    let beta = json(&out)["beta"].as_f64().unwrap();
    assert!((beta - 0.5 * 2f64.ln()).abs() < 1e-15);
}

#[test]
fn points_and_measures_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let z = write(dir.path(), "z.json", I);
    let mu = write(dir.path(), "mu.json", ATOM);
    let out = run(&["berezin", "--measure", &mu, "--z", &z]);
    assert_eq!(out.status.code(), Some(0));
    let b = json(&out)["berezin"]["value"].as_f64().unwrap();
    assert!((b - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-16);

    let out = run(&["averaging", "--measure", &mu, "--z", &z, "--r", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let a = json(&out)["averaging"]["value"].as_f64().unwrap();
    assert!((a - 0.024_198_500_003_239_913).abs() < 1e-15);
}

#[test]
fn lattice_output_shape() {
    let out = run(&[
        "lattice",
        "--region",
        r#"{"rho_min":0.5,"rho_max":2,"max_abs":3}"#,
        "--r",
        "1",
        "--seed",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["r"].as_f64(), Some(1.0));
    assert!(!v["centers"].as_array().unwrap().is_empty());
    assert!(v["multiplicity_estimate"].as_u64().unwrap() >= 1);

    let out = run(&["lattice", "--region", r#"{"rho_min":0,"rho_max":"inf"}"#, "--r", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn diagnose_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mu = write(dir.path(), "mu.json", ATOM);
    let report = dir.path().join("report.json");
    let out = run(&[
        "diagnose",
        "--measure",
        &mu,
        "--r",
        "1.0",
        "--seed",
        "7",
        "--samples",
        "2000",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&report).unwrap();
    let parsed: DiagnosticsReport = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed.to_json() + "\n", text);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["verdict_vanishing"], "vanishing_consistent");

    let out = run(&["diagnose", "--measure", &mu, "--seed", "7", "--samples", "2000", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("condition,regime,path,shell,lo,hi,mean,max,count\n"));
    let cols = csv.lines().next().unwrap().split(',').count();
    assert!(csv.lines().skip(1).all(|l| l.split(',').count() == cols));
}

#[test]
fn worker_count_does_not_change_results() {
    let lebesgue = r#"{"type":"lebesgue","dim":2}"#;
    let z = r#"{"zprime":[[0.3,-0.2]],"zn":[0.5,0.4]}"#;
    let args = ["berezin", "--measure", lebesgue, "--z", z, "--samples", "100000", "--seed", "3"];
    let outputs: Vec<_> = ["1", "3", "8"]
        .iter()
        .map(|t| {
            let out = bin().args(args).env("SIEGEL_BERGMAN_THREADS", t).output().unwrap();
            assert_eq!(out.status.code(), Some(0));
            out.stdout
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn small_verify_emits_table() {
    let out = run(&[
        "verify",
        "--samples",
        "20000",
        "--checks",
        "100",
        "--trials",
        "100",
        "--duality-samples",
        "20000",
    ]);
    let code = out.status.code().unwrap();
    let v = json(&out);
    let failed = v["failed"].as_u64().unwrap();
    assert_eq!(code, if failed == 0 { 0 } else { 1 });
    for row in v["rows"].as_array().unwrap() {
        for key in ["identity", "expected", "estimate", "sigma", "pass"] {
            assert!(row.get(key).is_some(), "missing {key}");
        }
    }
}
