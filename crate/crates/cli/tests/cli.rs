use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn posetnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posetnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(dir: &Path, name: &str) -> String {
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    let dst = dir.join(name);
    std::fs::copy(src, &dst).unwrap();
    dst.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn reducing_a_backtrack_gives_the_trivial_path() {
    let o = posetnet(&["paths", "reduce", "--poset", "crown2", "--path", "u(b1,a1)*d(a1,b1)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("i(b1)"), "{}", stdout(&o));
}

#[test]
fn equivalence_accepts_repeated_flags() {
    let turn = "d(a1,b2)*u(b2,a2)*d(a2,b1)*u(b1,a1)";
    let o = posetnet(&["paths", "equiv", "--poset", "crown2", "--path", turn, "--path", "i(a1)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("no"));
    let o = posetnet(&["paths", "equiv", "--poset", "crown2", "--path", "i(a1)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn abelianization_json_reports_rank_and_digest() {
    let dir = tempfile::tempdir().unwrap();
    let p = fixture(dir.path(), "crown2.json");
    let o = posetnet(&["--json", "pi1", "abelianize", "--poset", &p]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["rank"], 1);
    assert_eq!(v["result"]["torsion"], serde_json::json!([]));
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(posetnet(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(posetnet(&["paths", "reduce"]).status.code(), Some(2));
}

#[test]
fn malformed_input_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.json");
    std::fs::write(&p, "{\"elements\": [").unwrap();
    let o = posetnet(&["poset", "--poset", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
    let o = posetnet(&["poset", "--poset", "no_such_poset"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn example_runs_clean() {
    let o = posetnet(&["--quiet", "example", "run"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn non_intertwining_morphism_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), "chain.json");
    let net = fixture(dir.path(), "chain_growing_net.json");
    let map = dir.path().join("swap.json");
    std::fs::write(
        &map,
        r#"{"phi": {"a": "a", "b": "b", "c": "c"}, "Phi": {"a": [0], "b": [1, 0], "c": [0, 1, 2]}}"#,
    )
    .unwrap();
    let o = posetnet(&["--json", "morphism", "verify", "--src", &net, "--dst", &net, "--map", map.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "morphism verify");
}

#[test]
fn bundled_morphism_verifies() {
    let o = posetnet(&["morphism", "verify", "--src", "crown2_net", "--dst", "crown2_top_net", "--map", "crown2_into_top"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
