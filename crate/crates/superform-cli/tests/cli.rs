//! End-to-end tests of the command line: exit-code contract, document
//! formats, determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_superform"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

const TRIANGLE_BOUNDARY: &str = r#"{
  "ambient_dim": 2,
  "cells": [
    {"id": "a", "vertices": [["0", "0"]]},
    {"id": "b", "vertices": [["1", "0"]]},
    {"id": "c", "vertices": [["0", "1"]]},
    {"id": "ab", "vertices": [["0", "0"], ["1", "0"]]},
    {"id": "bc", "vertices": [["1", "0"], ["0", "1"]]},
    {"id": "ca", "vertices": [["0", "1"], ["0", "0"]]}
  ],
  "faces": [["a","ab"],["b","ab"],["b","bc"],["c","bc"],["c","ca"],["a","ca"]]
}"#;

const SOLID_TRIANGLE: &str = r#"{
  "ambient_dim": 2,
  "cells": [
    {"id": "a", "vertices": [["0", "0"]]},
    {"id": "b", "vertices": [["1", "0"]]},
    {"id": "c", "vertices": [["0", "1"]]},
    {"id": "ab", "vertices": [["0", "0"], ["1", "0"]]},
    {"id": "bc", "vertices": [["1", "0"], ["0", "1"]]},
    {"id": "ca", "vertices": [["0", "1"], ["0", "0"]]},
    {"id": "abc", "vertices": [["0", "0"], ["1", "0"], ["0", "1"]]}
  ],
  "faces": [["a","ab"],["b","ab"],["b","bc"],["c","bc"],["c","ca"],["a","ca"],
            ["ab","abc"],["bc","abc"],["ca","abc"]]
}"#;

const CROSSING_SEGMENTS: &str = r#"{
  "ambient_dim": 2,
  "cells": [
    {"id": "p", "vertices": [["0", "0"]]},
    {"id": "q", "vertices": [["1", "1"]]},
    {"id": "r", "vertices": [["1", "0"]]},
    {"id": "s", "vertices": [["0", "1"]]},
    {"id": "pq", "vertices": [["0", "0"], ["1", "1"]]},
    {"id": "rs", "vertices": [["1", "0"], ["0", "1"]]}
  ],
  "faces": [["p","pq"],["q","pq"],["r","rs"],["s","rs"]]
}"#;

const TROPICAL_LINE: &str = r#"{
  "ambient_dim": 2,
  "cells": [
    {"id": "o", "vertices": [["0", "0"]]},
    {"id": "e1", "vertices": [["0", "0"]], "rays": [["1", "0"]]},
    {"id": "e2", "vertices": [["0", "0"]], "rays": [["0", "1"]]},
    {"id": "e3", "vertices": [["0", "0"]], "rays": [["-1", "-1"]]}
  ],
  "faces": [["o","e1"],["o","e2"],["o","e3"]]
}"#;

/// x d'x + y d'y as a form document.
const RADIAL_FORM: &str = r#"{
  "ambient_dim": 2,
  "bidegree": [1, 0],
  "terms": [
    {"dI": [1], "dJ": [], "poly": [{"coeff": "1", "exps": [1, 0]}]},
    {"dI": [2], "dJ": [], "poly": [{"coeff": "1", "exps": [0, 1]}]}
  ]
}"#;

/// x2 d'x1, not d'-closed on a two-dimensional cell.
const NON_CLOSED_FORM: &str = r#"{
  "ambient_dim": 2,
  "bidegree": [1, 0],
  "terms": [
    {"dI": [1], "dJ": [], "poly": [{"coeff": "1", "exps": [0, 1]}]}
  ]
}"#;

const ZERO_FORM: &str = r#"{
  "ambient_dim": 2,
  "bidegree": [1, 0],
  "terms": []
}"#;

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = write(dir.path(), "tri.json", TRIANGLE_BOUNDARY);
    let out = run(&["validate", good.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("ok"));

    let bad = write(dir.path(), "cross.json", CROSSING_SEGMENTS);
    let out = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("intersection not a face"));
}

#[test]
fn validate_rejects_malformed_rational() {
    let dir = TempDir::new().unwrap();
    let path = write(
        dir.path(),
        "bad.json",
        r#"{"ambient_dim": 1, "cells": [{"id": "a", "vertices": [["1/0"]]}], "faces": []}"#,
    );
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("zero denominator"));
    // The serde error carries a location.
    assert!(stderr(&out).contains("line"));
}

#[test]
fn betti_table_output() {
    let dir = TempDir::new().unwrap();
    let tri = write(dir.path(), "tri.json", TRIANGLE_BOUNDARY);
    let out = run(&["betti", tri.to_str().unwrap(), "--q", "0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "q=0: H^0=1 H^1=1 [certified]");

    let line = write(dir.path(), "line.json", TROPICAL_LINE);
    let out = run(&["betti", line.to_str().unwrap(), "--q", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "q=1: H^0=2 H^1=0 [good-cover Čech]");
}

#[test]
fn betti_json_is_machine_readable_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let tri = write(dir.path(), "tri.json", TRIANGLE_BOUNDARY);
    let a = run(&["betti", tri.to_str().unwrap(), "--json"]);
    let b = run(&["betti", tri.to_str().unwrap(), "--json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "byte-identical reruns");
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(parsed["rows"][0]["q"], 0);
    assert_eq!(parsed["rows"][0]["dims"][0], 1);
    assert_eq!(parsed["rows"][0]["certified"], true);
}

#[test]
fn primitive_dprime_radial_form() {
    let dir = TempDir::new().unwrap();
    let tri = write(dir.path(), "tri.json", SOLID_TRIANGLE);
    let form = write(dir.path(), "radial.json", RADIAL_FORM);
    let out_path = dir.path().join("beta.json");
    let out = run(&[
        "primitive",
        tri.to_str().unwrap(),
        form.to_str().unwrap(),
        "--star",
        "a",
        "--op",
        "dprime",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    // beta = (x^2 + y^2) / 2.
    let beta = &doc["beta"][0];
    assert_eq!(beta["bidegree"][0], 0);
    let poly = &beta["terms"][0]["poly"];
    assert_eq!(poly[0]["coeff"], "1/2");
    assert_eq!(doc["check"]["verified"], true);
    assert_eq!(doc["check"]["domain"], "star:a");
}

#[test]
fn primitive_rejects_non_closed_input_with_witness() {
    let dir = TempDir::new().unwrap();
    let tri = write(dir.path(), "tri.json", SOLID_TRIANGLE);
    let form = write(dir.path(), "nonclosed.json", NON_CLOSED_FORM);
    let out = run(&[
        "primitive",
        tri.to_str().unwrap(),
        form.to_str().unwrap(),
        "--star",
        "a",
        "--op",
        "dprime",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("witness cell abc"));
}

#[test]
fn primitive_zero_form_succeeds() {
    let dir = TempDir::new().unwrap();
    let tri = write(dir.path(), "tri.json", SOLID_TRIANGLE);
    let form = write(dir.path(), "zero.json", ZERO_FORM);
    let out = run(&[
        "primitive",
        tri.to_str().unwrap(),
        form.to_str().unwrap(),
        "--star",
        "a",
        "--op",
        "dprime",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
}

#[test]
fn primitive_dreduce_emits_gamma() {
    let dir = TempDir::new().unwrap();
    let tri = write(dir.path(), "tri.json", SOLID_TRIANGLE);
    // x1 d''x1 is d-closed on the star of "a"? d'(x1 d''x1) = d'x1∧d''x1 ≠ 0
    // there, so use a (0,1)-form with constant coefficients instead.
    let form = write(
        dir.path(),
        "form.json",
        r#"{
          "ambient_dim": 2,
          "bidegree": [0, 1],
          "terms": [{"dI": [], "dJ": [1], "poly": [{"coeff": "1", "exps": [0, 0]}]}]
        }"#,
    );
    let out = run(&[
        "primitive",
        tri.to_str().unwrap(),
        form.to_str().unwrap(),
        "--star",
        "a",
        "--op",
        "dreduce",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["gamma"].is_object());
    assert_eq!(doc["gamma"]["bidegree"][1], 1);
}

#[test]
fn check_suites_pass_and_mention_counterexample() {
    let dir = TempDir::new().unwrap();
    let tri = write(dir.path(), "tri.json", SOLID_TRIANGLE);
    let out = run(&[
        "check",
        tri.to_str().unwrap(),
        "--suite",
        "all",
        "--seed",
        "7",
        "--count",
        "5",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("suite homotopy: 5 cases, pass"));
    assert!(text.contains("suite pullback: 5 cases, pass"));
    assert!(text.contains("counterexample reproduced"));

    // Empty runs pass trivially.
    let out = run(&["check", tri.to_str().unwrap(), "--count", "0"]);
    assert!(out.status.success());
}

#[test]
fn subdivide_emits_a_valid_complex() {
    let dir = TempDir::new().unwrap();
    let tri = write(dir.path(), "tri.json", SOLID_TRIANGLE);
    let out_path = dir.path().join("sub.json");
    let out = run(&[
        "subdivide",
        tri.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    // 7 vertices, 12 edges, 6 triangles.
    assert_eq!(doc["cells"].as_array().unwrap().len(), 25);
    let check = run(&["validate", out_path.to_str().unwrap()]);
    assert!(check.status.success(), "stderr: {}", stderr(&check));

    // Unbounded input is rejected.
    let line = write(dir.path(), "line.json", TROPICAL_LINE);
    let out = run(&["subdivide", line.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
