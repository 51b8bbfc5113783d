use std::fs;
use std::process::{Command, Output};

use echolab_core::pairs::LiftFile;
use serde_json::Value;

fn echolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_echolab")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn analyze_builtins() {
    for b in ["fib", "trib"] {
        let out = echolab(&["analyze", "--builtin", b]);
        assert_eq!(code(&out), 0);
        let text = stdout(&out);
        assert!(text.contains("classification: Pisot"), "{text}");
        assert!(text.contains("irreducible: Yes"), "{text}");
    }
    let v = json(&echolab(&["--format", "json", "analyze", "--builtin", "fib"]));
    assert_eq!(v["characteristic_polynomial"], "-1 - x + x^2");
    assert_eq!(v["primitive"], true);
}

#[test]
fn malformed_morphism_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    fs::write(&path, "{\"images\": [").unwrap();
    let out = echolab(&["analyze", "--morphism", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
    assert_eq!(code(&echolab(&["analyze", "--builtin", "nope"])), 2);
    assert_eq!(code(&echolab(&["analyze"])), 2);
}

#[test]
fn morphism_files_are_read() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tm.json");
    fs::write(&path, r#"{"images": ["01", "10"]}"#).unwrap();
    let out = echolab(&["analyze", "--morphism", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    // eigenvalues 2 and 0: Pisot, but the characteristic polynomial splits
    let text = stdout(&out);
    assert!(text.contains("classification: Pisot") && text.contains("irreducible: No"), "{text}");
}

#[test]
fn pairs_closure_and_budget() {
    let v = json(&echolab(&["--format", "json", "pairs", "--builtin", "trib", "--prefix", "0"]));
    assert_eq!(v["status"], "Closed");
    assert_eq!(v["system"]["symbols"].as_array().unwrap().len(), 11);
    assert_eq!(v["coincidence"]["satisfied"], true);

    let v = json(&echolab(&["--format", "json", "pairs", "--builtin", "fib", "--prefix", "0"]));
    assert_eq!(v["system"]["symbols"].as_array().unwrap().len(), 4);

    assert_eq!(code(&echolab(&["pairs", "--builtin", "trib", "--max-symbols", "2"])), 3);
    assert_eq!(code(&echolab(&["pairs", "--builtin", "fib", "--prefix", "1"])), 2);
}

#[test]
fn system_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sys.json");
    let p = path.to_str().unwrap();
    assert_eq!(code(&echolab(&["pairs", "--builtin", "trib", "--output", p])), 0);
    let written = fs::read_to_string(&path).unwrap();
    let file: LiftFile = serde_json::from_str(&written).unwrap();
    assert_eq!(serde_json::to_string_pretty(&file).unwrap(), written);
    let imported = json(&echolab(&["--format", "json", "pairs", "--builtin", "trib", "--import", p]));
    assert_eq!(imported["system"], serde_json::from_str::<Value>(&written).unwrap());
    assert_eq!(imported["consistent"], true);

    // an image that does not realize the lift is rejected on load
    let mut v: Value = serde_json::from_str(&written).unwrap();
    v["images"][0] = v["images"][1].clone();
    fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    let out = echolab(&["pairs", "--builtin", "trib", "--import", p]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not realize"));
}

#[test]
fn echo_fibonacci_passes_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let csv = dir.path().join("curves.csv");
    let c = cert.to_str().unwrap();
    let args = ["echo", "--builtin", "fib", "--epsilon", "1/10", "--n-max", "12", "--horizon", "100000"];
    let out = echolab(&[&args[..], &["--output", c, "--dump-csv", csv.to_str().unwrap()]].concat());
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("result: PASS"));

    let written = fs::read_to_string(&cert).unwrap();
    let reparsed = echolab_core::EchoingCertificate::from_json(&written).unwrap();
    assert_eq!(reparsed.to_json(), written);
    let out = echolab(&["echo", "--builtin", "fib", "--horizon", "100000", "--verify-only", c]);
    assert_eq!(code(&out), 0);

    let curves = fs::read_to_string(&csv).unwrap();
    assert!(curves.starts_with("n,kind,index,value\n"));
    assert!(curves.lines().any(|l| l.starts_with("12,gap,")));
}

#[test]
fn tampered_certificates_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let c = cert.to_str().unwrap();
    let out = echolab(&["echo", "--builtin", "fib", "--n-max", "6", "--horizon", "20000", "--output", c]);
    assert_eq!(code(&out), 0);
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    v["entries"][2]["intervals"].as_array_mut().unwrap().remove(0);
    fs::write(&cert, v.to_string()).unwrap();
    let out = echolab(&["echo", "--builtin", "fib", "--horizon", "20000", "--verify-only", c]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("covering FAIL"));

    // reversed bounds are a structural failure, not a parse error
    v["entries"][0]["intervals"][0] = serde_json::json!([10, 3]);
    fs::write(&cert, v.to_string()).unwrap();
    assert_eq!(code(&echolab(&["echo", "--builtin", "fib", "--horizon", "20000", "--verify-only", c])), 1);

    fs::write(&cert, "not json").unwrap();
    assert_eq!(code(&echolab(&["echo", "--builtin", "fib", "--verify-only", c])), 2);
}

#[test]
fn strong_echo_reports_probes() {
    let out = echolab(&[
        "--format", "json", "echo", "--builtin", "trib", "--strong", "--beta", "2,1+i", "--n-max", "6", "--gap-floor",
        "1/10000",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let v = json(&out);
    let probes = v["probes"].as_array().unwrap();
    assert_eq!(probes.len(), 2);
    for p in probes {
        assert_eq!(p["witness"], serde_json::json!([1, 2]));
        assert_eq!(p["undetermined"], 0);
    }
    assert_eq!(v["verification"]["verdicts"]["gap_ceiling"], true);
}

#[test]
fn tribonacci_fails_the_default_gap_floor() {
    let out = echolab(&["echo", "--builtin", "trib", "--n-max", "6"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("expanding gaps FAIL"));
}

#[test]
fn kbonacci_checks() {
    let out = echolab(&["kbonacci", "--k", "3", "--paper-labels"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("cycle covers: 1"));
    assert!(text.contains("a6   [-1,1,2]     [0102;2010]                  -> a8 a1 a3 a1"), "{text}");
    assert!(text.contains("det M_0 = -x^12"));

    let v = json(&echolab(&["--format", "json", "kbonacci", "--k", "6"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["cycle_covers"], "1");
    assert_eq!(code(&echolab(&["kbonacci", "--k", "1"])), 2);
    assert_eq!(code(&echolab(&["kbonacci", "--k", "8"])), 3);
}

#[test]
fn eval_and_domain_errors() {
    let v = json(&echolab(&["--format", "json", "eval", "--builtin", "fib", "--beta", "2", "--error", "1e-30"]));
    assert!(v["digits"].as_u64().unwrap() >= 30);
    assert!(v["center"]["re"].as_str().unwrap().starts_with("0.580393114277417370716425201110"));
    assert_eq!(code(&echolab(&["eval", "--builtin", "fib", "--beta", "1/2"])), 2);
    assert_eq!(code(&echolab(&["eval", "--builtin", "fib", "--beta", "-1/3+1/3i"])), 2);
    assert_eq!(code(&echolab(&["eval", "--builtin", "fib", "--beta", "two"])), 2);
    let out = echolab(&["eval", "--builtin", "trib", "--beta", "1+i", "--error", "1/1000000"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains(" i\n"));
}

#[test]
fn align_marks_mismatches() {
    let out = echolab(&["align", "--builtin", "fib", "--r", "0", "--s", "5", "--width", "40"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let marks = text.lines().nth(2).unwrap();
    let cols: Vec<usize> = marks.char_indices().filter(|(_, c)| *c == '^').map(|(i, _)| i).collect();
    assert_eq!(cols, [6, 7, 19, 20, 27, 28]);
    assert_eq!(code(&echolab(&["align", "--builtin", "fib", "--r", "5", "--s", "5"])), 2);
}

#[test]
fn json_output_is_deterministic_and_meta_goes_to_stderr() {
    let args = ["--format", "json", "echo", "--builtin", "fib", "--n-max", "8", "--horizon", "30000"];
    let a = echolab(&args);
    let b = echolab(&args);
    assert_eq!(a.stdout, b.stdout);
    let m = echolab(&[&args[..], &["--meta"]].concat());
    assert_eq!(m.stdout, a.stdout);
    let meta: Value = serde_json::from_slice(&m.stderr).unwrap();
    assert!(meta["unix_time"].as_u64().is_some());
    assert_eq!(meta["exit_code"], 0);
}
