//! End-to-end tests of the `twolocal` binary: exit codes, strict parsing,
//! flag overrides and report determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twolocal"))
}

fn problems() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("twolocal-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn simple_pole_ledger_passes_with_exit_zero() {
    let file = problems().join("reciprocity_simple_pole.json");
    let out = run(&["reciprocity", file.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdict"], "PASS");
    // worked ledger: entries -1 (constant) and +1 (weierstrass)
    let entries = report["results"]["entries"].as_array().unwrap();
    assert!(entries[0]["rres"].as_str().unwrap().starts_with("[-1"));
    assert!(entries[1]["rres"].as_str().unwrap().starts_with("[1 "));
}

#[test]
fn different_for_x2_minus_2_over_q2_is_three() {
    let file = problems().join("different_x2_minus_2_q2.json");
    let out = run(&["different", file.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["results"]["d_jacobian"], 3);
    assert_eq!(report["results"]["d_oracle"], 3);
    assert_eq!(report["results"]["floor_formula"]["all_ok"], true);
}

#[test]
fn malformed_stanza_missing_prime_exits_64_naming_the_key() {
    let path = write_temp(
        "missing_prime.json",
        r#"{"version":1,"kind":"reciprocity","reciprocity":{"base":{"kind":"trivial"},"terms":[]}}"#,
    );
    let out = run(&["reciprocity", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("prime"), "{msg}");
    assert!(msg.contains("line"), "{msg}");
}

#[test]
fn unknown_keys_are_rejected() {
    let path = write_temp(
        "unknown_key.json",
        r#"{"version":1,"kind":"selftest","selftest":{},"surplus":1}"#,
    );
    let out = run(&["selftest", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("surplus"));
}

#[test]
fn subcommand_must_match_file_kind() {
    let file = problems().join("reciprocity_simple_pole.json");
    let out = run(&["different", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn bad_window_flag_is_a_usage_error() {
    let file = problems().join("reciprocity_simple_pole.json");
    let out = run(&["reciprocity", file.to_str().unwrap(), "--window", "garbage"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn json_reports_are_deterministic_modulo_timing() {
    let file = problems().join("reciprocity_dlog_quadratic.json");
    let strip = |out: &Output| -> serde_json::Value {
        let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v.as_object_mut().unwrap().remove("timing_ms");
        v
    };
    let a = run(&["reciprocity", file.to_str().unwrap(), "--json", "--seed", "11"]);
    let b = run(&["reciprocity", file.to_str().unwrap(), "--json", "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0));
    let (ja, jb) = (strip(&a), strip(&b));
    assert_eq!(
        serde_json::to_string(&ja).unwrap(),
        serde_json::to_string(&jb).unwrap()
    );
    // a different seed changes the irrelevant-prime spot check
    let c = run(&["reciprocity", file.to_str().unwrap(), "--json", "--seed", "12"]);
    assert_eq!(c.status.code(), Some(0));
    assert_ne!(
        serde_json::to_string(&ja).unwrap(),
        serde_json::to_string(&strip(&c)).unwrap()
    );
}

#[test]
fn prec_override_rescales_threshold() {
    let file = problems().join("reciprocity_simple_pole.json");
    let out = run(&["reciprocity", file.to_str().unwrap(), "--json", "--prec", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["options"]["prec"], 8);
    assert_eq!(report["options"]["threshold"], 5);
    assert_eq!(report["verdict"], "PASS");
}

#[test]
fn extension_reciprocity_problem_passes() {
    let file = problems().join("reciprocity_extension.json");
    let out = run(&["reciprocity", file.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdict"], "PASS");
}

#[test]
fn membership_and_certificate_problems() {
    let out = run(&[
        "dualizing",
        problems().join("dualizing_membership_one_over_x.json").to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["results"]["membership"], "PASS");

    let out = run(&[
        "dualizing",
        problems().join("dualizing_cubic_surface_p5.json").to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdict"], "PASS");
    let boundary = report["results"]["boundary"].as_array().unwrap();
    assert!(!boundary.is_empty());
    for b in boundary {
        assert_eq!(b["verdict"], "FAIL");
    }
}

#[test]
fn residue_with_residue_field_comparison() {
    let file = problems().join("residue_mixed_inverse_t.json");
    let out = run(&["residue", file.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["results"]["matches"], true);
    assert_eq!(report["results"]["global_sign"], -1);
    assert!(report["results"]["residue"].as_str().unwrap().starts_with("[-1"));
}

#[test]
fn equal_char_parameter_change_keeps_residue() {
    let file = problems().join("residue_parameter_change.json");
    let out = run(&["residue", file.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["results"]["residue"].as_str().unwrap().starts_with("[1 "));
}

#[test]
fn functoriality_problems_pass() {
    for name in ["functoriality_tame.json", "functoriality_mixed_eisenstein.json"] {
        let out = run(&["functoriality", problems().join(name).to_str().unwrap(), "--json"]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report["verdict"], "PASS", "{name}");
    }
}

#[test]
fn quick_selftest_subset_passes_and_seed_is_deterministic() {
    let file = problems().join("selftest_quick.json");
    let a = run(&["selftest", file.to_str().unwrap(), "--json", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    let b = run(&["selftest", file.to_str().unwrap(), "--json", "--seed", "7"]);
    let strip = |out: &Output| -> serde_json::Value {
        let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v.as_object_mut().unwrap().remove("timing_ms");
        v
    };
    assert_eq!(
        serde_json::to_string(&strip(&a)).unwrap(),
        serde_json::to_string(&strip(&b)).unwrap()
    );
}

#[test]
fn unreachable_threshold_is_inconclusive_exit_two() {
    // total is certified to ~N digits; demanding more cannot be certified
    let file = problems().join("reciprocity_simple_pole.json");
    let out = run(&["reciprocity", file.to_str().unwrap(), "--json", "--threshold", "20"]);
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdict"], "INCONCLUSIVE");
}

#[test]
fn window_flag_is_honoured() {
    let file = problems().join("reciprocity_simple_pole.json");
    let out = run(&["reciprocity", file.to_str().unwrap(), "--json", "--window", "-32:32"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["options"]["window"][0], -32);
    assert_eq!(report["verdict"], "PASS");
}
