use std::fs;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;

use hcl_core::grid::{write_hcl1, GridDomain, ScalarField};

fn hcl(args: &[&str], dir: &Path) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_hcl"))
        .args(args)
        .arg("--quiet")
        .current_dir(dir)
        .env("HCL_THREADS", "2")
        .output()
        .expect("binary runs");
    out.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const CLOSED: &str = r#"{
  "domain": {"kind": "torus", "n": 2, "cells": 4},
  "family": {"kind": "log_det", "n": 2},
  "psi": "f_identity",
  "mode": "closed"
}"#;

#[test]
fn lemma_battery_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(hcl(&["lemma-check", "--out", "a", "--seed", "7"], d), 0);
    assert_eq!(hcl(&["lemma-check", "--out", "b", "--seed", "7"], d), 0);
    assert_eq!(hcl(&["lemma-check", "--out", "c", "--seed", "8"], d), 0);
    let a = fs::read(d.join("a/lemma_check.csv")).unwrap();
    let b = fs::read(d.join("b/lemma_check.csv")).unwrap();
    let c = fs::read(d.join("c/lemma_check.csv")).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# hcl-schema v1"));
    assert_eq!(lines.next(), Some("# seed=7 command=lemma-check"));
    assert!(lines.next().unwrap().starts_with("instance,n,epsilon,multiplier"));
    assert_eq!(text.lines().count(), 3 + 3000);
    assert!(!text.contains(",false,"));
}

#[test]
fn lemma_violation_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "bad.json",
        r#"[{"n":3,"d":[0.0,0.0],"a_re":[1.0,1.0],"a_im":[0.0,0.0],"epsilon":0.1,"corner_multipliers":[0.0]}]"#,
    );
    assert_eq!(hcl(&["lemma-check", "--config", &cfg, "--out", "o"], tmp.path()), 2);
}

#[test]
fn closed_constants_row() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "closed.json", CLOSED);
    assert_eq!(hcl(&["solve-closed", "--config", &cfg, "--out", "o"], tmp.path()), 0);
    let text = fs::read_to_string(tmp.path().join("o/solve_closed.csv")).unwrap();
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let head = rdr.headers().unwrap().clone();
    let row = rdr.records().next().unwrap().unwrap();
    let c: f64 = row[head.iter().position(|h| h == "c").unwrap()].parse().unwrap();
    assert_eq!(c, 0.0);
    let bin = fs::read(tmp.path().join("o/solution.hcl1")).unwrap();
    assert_eq!(&bin[..4], b"HCL1");
    let field = fs::read_to_string(tmp.path().join("o/solution.csv")).unwrap();
    assert!(field.starts_with("# hcl-schema v1\n# seed="));
}

#[test]
fn config_errors_exit_four() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(hcl(&["solve-closed", "--config", "missing.json", "--out", "o"], d), 4);
    assert_eq!(hcl(&["solve-closed", "--out", "o"], d), 4);
    let bad = write(d, "bad.json", "{ not json");
    assert_eq!(hcl(&["solve-closed", "--config", &bad, "--out", "o"], d), 4);
    let missing_field = write(
        d,
        "field.json",
        r#"{"domain": {"kind": "torus", "n": 2, "cells": 4}, "family": {"kind": "log_det", "n": 2},
            "psi": {"file": "nowhere.hcl1"}, "mode": "closed"}"#,
    );
    assert_eq!(hcl(&["solve-closed", "--config", &missing_field, "--out", "o"], d), 4);
    let closed = write(d, "closed.json", CLOSED);
    assert_eq!(hcl(&["solve-dirichlet", "--config", &closed, "--out", "o"], d), 4);
}

#[test]
fn numeric_errors_exit_three() {
    let tmp = tempfile::tempdir().unwrap();
    // ψ = 0 = sup over ∂Γ for σ_2^{1/2}: degenerate, refused by the plain solve
    let cfg = write(
        tmp.path(),
        "deg.json",
        r#"{"domain": {"kind": "product", "n": 2, "x_cells": 4, "s": {"shape": "rectangle", "cells": [8, 8]}},
            "family": {"kind": "sigma_root", "k": 2, "n": 2}, "psi": "const:0", "phi": "zero", "mode": "dirichlet"}"#,
    );
    assert_eq!(hcl(&["solve-dirichlet", "--config", &cfg, "--out", "o"], tmp.path()), 3);
}

#[test]
fn field_files_resolve_relative_to_config() {
    let tmp = tempfile::tempdir().unwrap();
    let sub = tmp.path().join("cfg");
    fs::create_dir(&sub).unwrap();
    let d = Arc::new(GridDomain::cubic_torus(2, 4).unwrap());
    let psi = ScalarField::constant(d, -0.25);
    let mut bytes = Vec::new();
    write_hcl1(&psi, &mut bytes).unwrap();
    fs::write(sub.join("psi.hcl1"), bytes).unwrap();
    let cfg = write(
        &sub,
        "p.json",
        r#"{"domain": {"kind": "torus", "n": 2, "cells": 4}, "family": {"kind": "log_det", "n": 2},
            "psi": {"file": "psi.hcl1"}, "mode": "closed"}"#,
    );
    assert_eq!(hcl(&["solve-closed", "--config", &cfg, "--out", "o"], tmp.path()), 0);
    let text = fs::read_to_string(tmp.path().join("o/solve_closed.csv")).unwrap();
    assert!(text.lines().nth(3).unwrap().contains(",0.25,"));
}

#[test]
fn subsol_and_cone_batteries_pass() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(hcl(&["subsol-check", "--out", "s"], tmp.path()), 0);
    assert_eq!(hcl(&["cone-check", "--out", "c"], tmp.path()), 0);
    let dich = fs::read_to_string(tmp.path().join("s/dichotomy.csv")).unwrap();
    assert_eq!(dich.lines().count(), 3 + 3);
    assert!(tmp.path().join("s/contexts.json").exists());
    assert!(tmp.path().join("c/structure.csv").exists());
}
