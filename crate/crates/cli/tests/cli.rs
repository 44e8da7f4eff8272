use std::path::Path;
use std::process::Command;

fn fracsparse(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_fracsparse")).args(args).output().expect("spawn")
}

fn verify_into(dir: &Path) -> Vec<u8> {
    let out = fracsparse(&["verify", "--seed", "42", "--csv", "--svg", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("verify.svg").exists());
    std::fs::read(dir.join("verify.csv")).unwrap()
}

#[test]
fn verify_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let x = verify_into(a.path());
    let y = verify_into(b.path());
    assert!(x.starts_with(b"experiment,seed,quantity,value,meta\n"));
    assert_eq!(x, y);
}

#[test]
fn config_overrides_and_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("w.json");
    std::fs::write(&cfg, r#"{"domain": {"depth": 4}, "omega": {"kind": "power", "center": [0.0], "exponent": 0.3}}"#).unwrap();
    let out = fracsparse(&["weights", "--config", cfg.to_str().unwrap(), "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("omega:A_inf"), "{text}");

    std::fs::write(&cfg, r#"{"no_such_field": 1}"#).unwrap();
    let out = fracsparse(&["weights", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fracpow_checks_pass() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("f.json");
    std::fs::write(&cfg, r#"{"domain": {"depth": 6}}"#).unwrap();
    let out = fracsparse(&["fracpow", "--config", cfg.to_str().unwrap()]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("PASS operator_error"), "{text}");
}
