use std::process::{Command, Output};

use tempfile::tempdir;

fn geo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geo")).args(args).env("GEO_THREADS", "1").output().expect("run geo")
}

#[test]
fn malformed_body_names_the_field() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"type":"vpolytope","dim":2,"vertices":[[0,0],[1,"x"],[0,1]]}"#).unwrap();
    let out = geo(&["asymmetry", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("vertices[1][1]"), "{err}");
}

#[test]
fn constructed_body_passes_planar_check() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("body.json");
    let p = path.to_str().unwrap();
    let out = geo(&["construct", "small-asym", "--n", "2", "--k", "1", "--s", "1.5", "-o", p]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("rows.csv");
    let out = geo(&["verify", "planar-diameter", "--body", p, "-o", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("suite,case_id,n,k,s,t,quantity,measured,bound,slack,pass,method,seed"));
}

#[test]
fn scalar_suite_exits_cleanly() {
    assert_eq!(geo(&["verify", "scalar-lemmas"]).status.code(), Some(0));
}

#[test]
fn unknown_suite_is_rejected() {
    assert_eq!(geo(&["verify", "no-such-suite"]).status.code(), Some(2));
}
