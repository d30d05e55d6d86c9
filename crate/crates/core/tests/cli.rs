use std::path::Path;
use std::process::{Command, Output};

fn mcdw(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcdw"))
        .env("MCDW_CACHE", cache)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn construct_uses_cache_env() {
    let dir = tempfile::tempdir().unwrap();
    let o = mcdw(dir.path(), &["construct", "--family", "J2", "--ell", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["order"], 16);
    assert_eq!(v["class"], 3);
    assert_eq!(v["cache_hit"], false);
    assert!(dir.path().join("J2_p2_m1_l1.mcdw").exists());
    let o = mcdw(dir.path(), &["construct", "--family", "J2", "--ell", "1", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["cache_hit"], true);
}

#[test]
fn series_text() {
    let dir = tempfile::tempdir().unwrap();
    let o = mcdw(dir.path(), &["series", "--family", "J1", "--p", "3", "--ell", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("class 5"));
    assert!(s.lines().any(|l| l.starts_with("Z5") && l.contains("2187")));
}

#[test]
fn iso_exit_codes_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let o = mcdw(
        dir.path(),
        &["iso", "--family", "J2", "--m", "2", "--ellA", "1", "--ellB", "3", "--out", cert.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("isomorphic"));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&cert).unwrap()).unwrap();
    assert!(v.is_object());

    let o = mcdw(dir.path(), &["iso", "--family", "H1", "--p", "5", "--ellA", "1", "--ellB", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NOT isomorphic"));
}

#[test]
fn usage_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["bogus"][..],
        &["construct", "--family", "J2"],
        &["construct", "--family", "J9", "--ell", "1"],
        &["construct", "--family", "J1", "--p", "3", "--ell", "3"],
        &["verify", "--necj2"],
        &["construct", "--family", "J1", "--ell", "1"],
    ] {
        let o = mcdw(dir.path(), args);
        assert_eq!(o.status.code(), Some(3), "{args:?}");
    }
    assert_eq!(mcdw(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(mcdw(dir.path(), &["--version"]).status.code(), Some(0));
}

#[test]
fn verify_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bundle.json");
    let o = mcdw(
        dir.path(),
        &["verify", "--theorem", "c", "--necj2", "--ellA", "1", "--ellB", "3", "--out", out.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("2/2 passed"));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["theorem_C", "necj2"]);
}
