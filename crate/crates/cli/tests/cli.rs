//! The `genus13` binary: reports, exit codes and reproducibility.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genus13")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("genus13-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn virtual_class_report_passes() {
    let out = run(&["compute-virtual-class"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["subcommand"], "compute-virtual-class");
    assert_eq!(v["outputs"]["slope"], "5059/749");
    assert_eq!(v["outputs"]["a"], "15177");
}

#[test]
fn bundle_and_divisor_reports_pass() {
    for cmd in ["count-bundles", "divisor-report"] {
        let out = run(&[cmd, "--no-timing"]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn prove_one_tableau() {
    let path = temp_file(
        "tableau.json",
        r#"{"top":[1,2,3,4,5,6],"bottom":[7,8,9,10,11,12],"lingering":13,"genus":13}"#,
    );
    let out = run(&["prove-smrc", "--tableau", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["config"]["scale_base"], "10000");
    assert!(v["verdicts"].as_array().unwrap().iter().all(|x| x["pass"] == true));
}

#[test]
fn malformed_input_exits_with_2() {
    let path = temp_file("broken.json", "{ not json");
    let out = run(&["prove-smrc", "--tableau", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "input");

    // Well-formed JSON but not a standard tableau.
    let path = temp_file(
        "nonstandard.json",
        r#"{"top":[2,1,3,4,5,6],"bottom":[7,8,9,10,11,12],"lingering":13,"genus":13}"#,
    );
    let out = run(&["prove-smrc", "--tableau", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["prove-smrc", "--tableau", "/nonexistent/tableau.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_arguments_exit_with_2() {
    assert_eq!(run(&["enumerate", "--genus", "14", "--all"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "--genus", "13"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "--genus", "13", "--limit", "1", "--scale-base", "1"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn enumerate_a_few_cases() {
    let out = run(&["enumerate", "--genus", "11", "--limit", "5", "--jobs", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["outputs"]["total"], 5);
    assert_eq!(v["outputs"]["certified"], 5);
    assert!(v["outputs"]["cases"].is_null());

    let v = json(&run(&["enumerate", "--genus", "11", "--limit", "2", "--cases"]));
    let cases = v["outputs"]["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 2);
    assert!(cases.iter().all(|c| c["certified"] == true && c["report"].is_object()));
}

#[test]
fn reports_are_reproducible_without_timing() {
    let a = run(&["divisor-report", "--no-timing"]);
    let b = run(&["divisor-report", "--no-timing"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a).get("timing_ms").is_none_or(Value::is_null));
}

#[test]
fn out_flag_writes_the_report() {
    let path = temp_file("report.json", "");
    let out = run(&["compute-virtual-class", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["outputs"]["b1"], "11787");
}
