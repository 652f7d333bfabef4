use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn gradinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gradinv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/sec3")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn classify_odd_has_one_class() {
    let out = gradinv(&["classify", "--n", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    for key in ["command", "input", "result", "expected", "match"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    assert_eq!(doc["result"]["equivalence_classes"], 1);
    assert_eq!(doc["expected"]["equivalence_classes"], 1);
    assert_eq!(doc["match"], true);
}

#[test]
fn classify_csv_table() {
    let out = gradinv(&["classify", "--n", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let body = String::from_utf8(out.stdout).unwrap();
    let mut lines = body.lines();
    assert_eq!(
        lines.next(),
        Some("orbit,lambda_a,lambda_b,iso_class,equiv_class,epsilon_b")
    );
    assert_eq!(lines.count(), 5);
}

#[test]
fn orbit_table_row_is_already_canonical() {
    let out = gradinv(&["orbit", "--n", "4", "--matrix", "1,2,2,-1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["result"]["canonical"], "theta3");
    assert_eq!(doc["result"]["witness"], serde_json::json!([[1, 0], [0, 1]]));
}

#[test]
fn orbit_outside_locus_is_input_error() {
    let out = gradinv(&["orbit", "--n", "4", "--matrix", "1,0,0,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn orbit_sweep() {
    let out = gradinv(&["orbit", "--n", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["result"]["forms_reached"], 3);
}

#[test]
fn check_verdict_drives_exit_code() {
    let yes = gradinv(&[
        "check", "--group", "Z2^2", "--tau", "1,1,0,1", "--lambda", "za:4:1,zb:4:0",
    ]);
    assert_eq!(yes.status.code(), Some(0));
    let doc = json_of(&yes);
    assert_eq!(doc["result"]["homogeneous"], true);
    assert_eq!(doc["match"], true);

    let no = gradinv(&[
        "check", "--group", "Z2^2", "--tau", "1,1,0,1", "--lambda", "za:4:0,zb:4:0",
    ]);
    assert_eq!(no.status.code(), Some(1));
    assert_eq!(json_of(&no)["match"], false);
}

#[test]
fn check_rejects_malformed_input() {
    for args in [
        &["check", "--group", "Z2^2", "--tau", "1,1,0", "--lambda", "za:4:1,zb:4:0"][..],
        &["check", "--group", "Z2^2", "--tau", "1,1,0,1", "--lambda", "a:4:1,zb:4:0"],
        &["check", "--group", "Z2x Z3", "--tau", "1,0,0,1", "--lambda", "za:4:1,zb:4:0"],
        &["check", "--group", "Z2^2", "--tau", "1,0,0,1", "--lambda", "za:4:1"],
    ] {
        assert_eq!(gradinv(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unknown_flags_print_usage() {
    let out = gradinv(&["classify", "--n", "3", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(gradinv(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn caps_are_enforced() {
    assert_eq!(gradinv(&["classify", "--n", "5", "--n-cap", "4"]).status.code(), Some(2));
    let out = gradinv(&[
        "check", "--group", "Z4^2", "--tau", "1,0,0,1", "--lambda", "za:4:0,zb:4:0",
        "--group-cap", "8",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sec3_valid_and_invalid() {
    let ok = gradinv(&["sec3", "--spec", &data("z4_symplectic_pairs.json")]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json_of(&ok)["result"]["epsilon_b"], -1);

    let bad = gradinv(&["sec3", "--spec", &data("invalid/wrong_dual_degree.json")]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json_of(&bad)["result"]["valid"], false);

    assert_eq!(gradinv(&["sec3", "--spec", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn verify_tables_by_modulus() {
    for n in ["3", "4", "8", "9", "16"] {
        assert_eq!(gradinv(&["verify-tables", "--n", n]).status.code(), Some(0), "{n}");
    }
    assert_eq!(gradinv(&["verify-tables", "--n", "6"]).status.code(), Some(2));
}

#[test]
fn realize_with_oracle() {
    let out = gradinv(&["realize", "--n", "2", "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["result"]["products_match_cocycle"], true);
    assert_eq!(doc["result"]["oracle"]["accepted_failures"], 0);
}

#[test]
fn reports_are_deterministic() {
    for args in [
        &["classify", "--n", "4"][..],
        &["realize", "--n", "3"],
        &["sec3", "--spec", &data("z4xz2_pauli_embedded.json")],
    ] {
        assert_eq!(gradinv(args).stdout, gradinv(args).stdout, "{args:?}");
    }
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = gradinv(&["classify", "--n", "5", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["match"], true);
}
