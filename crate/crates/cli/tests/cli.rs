use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sheafmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sheafmod")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn m3_fails_with_distributivity_witness() {
    let out = sheafmod(&["frame", "check", "M3"]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL frame distributivity"), "{stdout}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("law failure"));
    let v = json(&sheafmod(&["frame", "check", "M3", "--format", "json"]));
    let failing: Vec<&Value> =
        v["reports"][0]["checks"].as_array().unwrap().iter().filter(|c| c["holds"] == false).collect();
    assert!(!failing.is_empty());
    assert_eq!(failing[0]["witness"]["indices"].as_array().unwrap().len(), 3);
}

#[test]
fn frame_fixtures_and_posets_pass() {
    for name in ["B1", "B2", "C3", "BD"] {
        assert_eq!(sheafmod(&["frame", "check", name]).status.code(), Some(0), "{name}");
    }
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "v.json", r#"{"elements": ["a", "b", "c"], "leq": [[0, 2], [1, 2]]}"#);
    let v = json(&sheafmod(&["frame", "check", &f, "--format", "json"]));
    assert_eq!(v["data"]["elements"], 5);
    assert_eq!(v["passed"], true);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cyc = write(dir.path(), "cyc.json", r#"{"elements": ["a", "b"], "leq": [[0, 1], [1, 0]]}"#);
    let junk = write(dir.path(), "junk.json", "{ not json");
    for args in [
        vec!["frame", "check", cyc.as_str()],
        vec!["frame", "check", junk.as_str()],
        vec!["frame", "check", "NOPE"],
        vec!["frame", "check", "BD", "--max-size", "3"],
        vec!["module", "check", "/no/such/file.json"],
    ] {
        let out = sheafmod(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn module_check_reports_verdicts() {
    let v = json(&sheafmod(&["module", "check", "CHAIN3", "--format", "json"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["data"]["open"], true);
    assert_eq!(v["data"]["etale"], false);
    let v = json(&sheafmod(&["module", "check", "FREE2", "--format", "json"]));
    assert_eq!(v["data"]["etale"], true);
    assert_eq!(v["data"]["sections"].as_array().unwrap().len(), 3);
    let out = sheafmod(&["module", "check", "CORRUPT"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sections_and_presheaf_table() {
    let v = json(&sheafmod(&["module", "sections", "FREE2", "--format", "json"]));
    assert_eq!(v["data"]["sections"].as_array().unwrap().len(), 3);
    assert_eq!(v["data"]["presheaf"][1]["sections"], serde_json::json!([1, 2]));
}

#[test]
fn hilbert_check_flags_chain3_degenerate() {
    let v = json(&sheafmod(&["hilbert", "check", "CHAIN3", "--format", "json"]));
    assert_eq!(v["passed"], true);
    let flags = &v["verdicts"][0]["checks"];
    assert_eq!(flags[0]["law"], "non-degenerate");
    assert_eq!(flags[0]["holds"], false);
    assert_eq!(flags[1]["holds"], true);
    assert_eq!(v["data"]["inner"]["table"], serde_json::json!([[0, 0, 0], [0, 1, 1], [0, 1, 1]]));
}

#[test]
fn hilbert_basis_accepts_labels_and_indices() {
    assert_eq!(sheafmod(&["hilbert", "basis", "FREE2", "(1,0),(0,1)"]).status.code(), Some(0));
    assert_eq!(sheafmod(&["hilbert", "basis", "FREE2", "1,2"]).status.code(), Some(0));
    assert_eq!(sheafmod(&["hilbert", "basis", "FREE2", "1"]).status.code(), Some(1));
    assert_eq!(sheafmod(&["hilbert", "basis", "FREE2", "9"]).status.code(), Some(2));
}

#[test]
fn identity_matrix_gives_free_module() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "id.json", r#"{"base": "B2", "index": ["s", "t"], "entries": [[1, 0], [0, 1]]}"#);
    let out = sheafmod(&["matrix", "to-module", &f, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["data"]["vectors"], serde_json::json!([[0, 0], [1, 0], [0, 1], [1, 1]]));
    assert_eq!(v["data"]["etale"], true);
    // the module dump is itself valid module input and converts back
    let m = write(dir.path(), "m.json", &v["data"]["module"].to_string());
    let back = json(&sheafmod(&["module", "to-matrix", &m, "--format", "json"]));
    assert_eq!(back["data"]["matrix"]["entries"], serde_json::json!([[1, 0], [0, 1]]));
}

#[test]
fn non_projection_matrix_is_a_law_failure() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bd.json", r#"{"base": "BD", "entries": [[3, 1], [2, 3]]}"#);
    let out = sheafmod(&["matrix", "to-module", &f]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL M = Mᵀ"));
    let ragged = write(dir.path(), "r.json", r#"{"base": "B2", "entries": [[1, 0], [0]]}"#);
    assert_eq!(sheafmod(&["matrix", "to-module", &ragged]).status.code(), Some(2));
}

#[test]
fn hom_commands() {
    let dir = tempfile::tempdir().unwrap();
    let swap = write(dir.path(), "swap.json", r#"{"source": "FREE2", "target": "FREE2", "table": [0, 2, 1, 3]}"#);
    let v = json(&sheafmod(&["hom", "adjoint", &swap, "--format", "json"]));
    assert_eq!(v["data"]["adjoint"], serde_json::json!([0, 2, 1, 3]));
    let zero = write(dir.path(), "zero.json", r#"{"source": "FREE2", "target": "FREE2", "table": [0, 0, 0, 0]}"#);
    let v = json(&sheafmod(&["hom", "check", &zero, "--format", "json"]));
    assert_eq!(v["data"]["module_hom"], true);
    assert_eq!(v["data"]["sheaf_hom"], false);
    let bad = write(dir.path(), "bad.json", r#"{"source": "FREE2", "target": "FREE2", "table": [0, 1, 2, 1]}"#);
    let out = sheafmod(&["hom", "check", &bad, "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["data"]["adjointable"], false);
    assert_eq!(sheafmod(&["hom", "adjoint", &bad]).status.code(), Some(1));
    let cross = write(dir.path(), "x.json", r#"{"source": "FREE2", "target": "IDENT", "table": [0, 0, 0, 0]}"#);
    assert_eq!(sheafmod(&["hom", "check", &cross]).status.code(), Some(2));
}

#[test]
fn map_dagger_check() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", r#"{"source": "FREE2", "target": "FREE2", "inverse_image": [0, 2, 1, 3]}"#);
    let v = json(&sheafmod(&["map", "dagger-check", &f, "--format", "json"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["data"]["direct_image"], serde_json::json!([0, 2, 1, 3]));
    let g = write(dir.path(), "g.json", r#"{"source": "FREE2", "target": "FREE2", "inverse_image": [0, 3, 3, 3]}"#);
    assert_eq!(sheafmod(&["map", "dagger-check", &g]).status.code(), Some(1));
}

#[test]
fn export_dot_draws_cover_edges() {
    let out = sheafmod(&["export", "dot", "BD"]);
    assert_eq!(out.status.code(), Some(0));
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), 4);
    let out = sheafmod(&["export", "dot", "FREE2"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().matches("->").count(), 4);
}

#[test]
fn suite_run_is_byte_identical() {
    let args = ["suite", "run", "--seed", "7", "--count", "25"];
    let a = sheafmod(&args);
    let b = sheafmod(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).contains("PASS: "));
    let j1 = sheafmod(&["suite", "run", "--seed", "3", "--count", "3", "--format", "json"]);
    let j2 = sheafmod(&["suite", "run", "--seed", "3", "--count", "3", "--format", "json"]);
    assert_eq!(j1.stdout, j2.stdout);
    assert_eq!(json(&j1)["seed"], 3);
}
