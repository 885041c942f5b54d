//! The binary end to end: exit codes and JSON reports.

use std::process::{Command, Output};

use serde_json::Value;

fn af2m(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_af2m"))
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = af2m(&all);
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    assert_eq!(v["exit"], out.status.code().unwrap());
    assert_eq!(v["schema"], "af2m-report/1");
    (out.status.code().unwrap(), v)
}

#[test]
fn factorial_of_two_is_two() {
    let (code, fac) = json(&["eval", "corpus/nat_adhoc.af2", "fac_bar two"]);
    assert_eq!(code, 0);
    let (_, two) = json(&["eval", "corpus/nat_adhoc.af2", "two"]);
    assert_eq!(fac["normal_form"], two["normal_form"]);
    assert_eq!(two["normal_form"], "in (inr (in (inr (in (inl unit)))))");
    assert!(fac["steps"].as_u64().unwrap() > 0);
}

#[test]
fn omega_is_rejected_with_a_cycle() {
    let (code, v) = json(&["sn", "tests/data/omega.af2", "omega"]);
    assert_eq!(code, 1);
    assert_eq!(v["sn"]["certified"], false);
    assert_eq!(v["sn"]["oracle"], "cycle");
    assert!(!v["sn"]["cycle"].as_array().unwrap().is_empty());
}

#[test]
fn corpus_terms_are_certified() {
    let (code, v) = json(&["sn", "corpus/nat_adhoc.af2", "sum_bar two two"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["sn"]["certified"], true);
    assert_eq!(v["sn"]["oracle"], "sn");
}

#[test]
fn lattice_fuzz_reports_no_violations() {
    let (code, v) = json(&["lattice-fuzz", "--size", "5", "--trials", "50", "--seed", "7"]);
    assert_eq!(code, 0);
    let c = &v["campaign"];
    assert_eq!(c["lattices"], 50);
    assert!(c["counterexamples"].as_array().unwrap().is_empty());
    for (name, p) in c["principles"].as_object().unwrap() {
        assert_eq!(p["violated"], 0, "{name}");
    }
}

#[test]
fn lattice_fuzz_is_deterministic() {
    let a = af2m(&["--json", "lattice-fuzz", "--size", "4", "--trials", "30", "--seed", "11"]);
    let b = af2m(&["--json", "lattice-fuzz", "--size", "4", "--trials", "30", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bundled_corpus_passes() {
    let out = af2m(&["corpus"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0 failed; rules not exercised: none"), "{text}");
}

#[test]
fn check_accepts_corpus_files() {
    let (code, v) = json(&["check", "corpus/order.af2", "corpus/obseq.af2"]);
    assert_eq!(code, 0);
    assert_eq!(v["summary"]["files"], 2);
    assert_eq!(v["summary"]["failed"], 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(af2m(&["bogus"]).status.code(), Some(2));
    assert_eq!(af2m(&["eval", "no/such/file.af2", "x"]).status.code(), Some(2));
    assert_eq!(af2m(&["eval", "corpus/nat_adhoc.af2", "\\x. )"]).status.code(), Some(2));
}

#[test]
fn failing_theorem_exits_one() {
    let dir = std::env::temp_dir().join(format!("af2m-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.af2");
    std::fs::write(&path, "pred P/1, Q/1;\ntheorem t {\n  1. var h : P(x)\n  2. imp-i 1 [h] : Q(x) -> P(x)\n}\n").unwrap();
    let out = af2m(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}
