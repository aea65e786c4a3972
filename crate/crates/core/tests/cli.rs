mod common;

use std::process::{Command, Output};

use common::system_path;

fn fpr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpr")).args(args).output().unwrap()
}

fn run(cmd: &str, system: &str, extra: &[&str]) -> (i32, String) {
    let path = system_path(system);
    let mut args = vec![cmd, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = fpr(&args);
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn check_reports_canonical_system() {
    let (code, out) = run("check", "ex2nd", &["--canonical"]);
    assert_eq!(code, 0);
    assert!(out.contains("canonical: yes"), "{out}");
}

#[test]
fn check_reports_parallel_violation() {
    let (code, out) = run("check", "faa", &["--simple"]);
    assert_eq!(code, 1);
    assert!(out.contains("simple: no"));
    assert!(out.contains("parallel"), "{out}");
}

#[test]
fn check_json_has_fixed_keys() {
    let (code, out) = run("check", "faa", &["--json"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in ["verdict", "violations", "simple", "canonical", "notes"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["verdict"], false);
    assert_eq!(v["violations"].as_array().unwrap().len(), 2);
}

#[test]
fn normalize_second_of_infinite_list() {
    let (code, out) = run("normalize", "ex2nd", &["-t", "2nd(inf(0))"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "s(0)");
}

#[test]
fn normalize_trace_lists_steps() {
    let (code, out) = run("normalize", "ex2nd", &["-t", "2nd(inf(0))", "--trace"]);
    assert_eq!(code, 0);
    assert!(out.contains("s(0)"));
    assert!(out.lines().count() > 1, "{out}");
}

#[test]
fn step_rewrites_allowed_redex() {
    let (code, out) = run("step", "ex2nd", &["-t", "inf(0)"]);
    assert_eq!(code, 0);
    assert!(out.contains("cons(0, inf(s(0)))"), "{out}");
}

#[test]
fn transform_matches_golden_tpdb() {
    let (code, out) = run("transform", "ex2nd", &["--tpdb"]);
    assert_eq!(code, 0);
    let golden = include_str!("golden/ex2nd.tpdb");
    assert_eq!(out, golden);
}

#[test]
fn transform_native_output_parses() {
    let (code, out) = run("transform", "app", &["--native"]);
    assert_eq!(code, 0);
    let sys = forbidden_patterns::parse_system(&out).unwrap();
    assert_eq!(sys.trs().rules().len(), 21);
    assert!(sys.patterns().is_empty());
}

#[test]
fn oracle_agrees_on_encodings() {
    for (enc, extra) in [("innermost", None), ("outermost", None), ("csr", Some("cons:1"))] {
        let mut args = vec!["--encoding", enc, "--depth", "2"];
        if let Some(mu) = extra {
            args.extend(["--mu", mu]);
        }
        let (code, out) = run("oracle", "app", &args);
        assert_eq!(code, 0, "{enc}: {out}");
        assert!(out.contains("discrepancies: 0"), "{enc}: {out}");
    }
}

#[test]
fn csr_oracle_needs_replacement_map() {
    let (code, _) = run("oracle", "app", &["--encoding", "csr"]);
    assert_eq!(code, 2);
}

#[test]
fn ground_check_json() {
    let (code, out) = run("ground-check", "ex2nd", &["--depth", "3", "--steps", "3", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], true);
    assert!(v["counterexamples"].as_array().unwrap().is_empty());
    assert!(v["terms_checked"].as_u64().unwrap() > 0);
}

#[test]
fn syntax_errors_exit_with_usage_code() {
    let dir = std::env::temp_dir().join(format!("fpr-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.trs");
    std::fs::write(&bad, "fun f/1 ;\nrule f(y) -> f(f(y)) ;\n").unwrap();
    let out = fpr(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains(":2:"), "{err}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn missing_file_and_unknown_flag() {
    assert_eq!(fpr(&["validate", "/nonexistent/x.trs"]).status.code(), Some(2));
    assert_eq!(fpr(&["check", "--bogus"]).status.code(), Some(2));
}
