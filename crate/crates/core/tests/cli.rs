//! End-to-end runs of the `gdimlab` binary: exit codes, output directory
//! resolution and reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn gdimlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gdimlab"))
        .current_dir(dir)
        .env_remove("GDIMLAB_OUT")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn ring_module_resolve_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = gdimlab(d, &["ring", "--kind", "hypersurface", "--r", "2", "--seed", "3", "--out", "o"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("hilbert [1, 3, 2]"));
    assert_eq!(code(&gdimlab(d, &["module", "--kind", "cyclic", "--name", "m", "--out", "o"])), 0);
    assert!(d.join("o/m.json").exists() && d.join("o/m.cert.json").exists());
    let out = gdimlab(d, &["resolve", "--module", "m", "--n", "4", "--out", "o"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&gdimlab(d, &["check", "--name", "m.cert", "--out", "o"])), 0);
}

#[test]
fn out_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_gdimlab"))
        .current_dir(dir.path())
        .env("GDIMLAB_OUT", &target)
        .args(["ring", "--kind", "veliche"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(target.join("ring.json").exists());
    assert!(!dir.path().join("gdimlab-out").exists());
}

#[test]
fn failed_checks_exit_one_with_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    gdimlab(d, &["ring", "--kind", "hypersurface", "--r", "2", "--out", "o"]);
    gdimlab(d, &["module", "--kind", "residue", "--name", "k", "--out", "o"]);
    let out = gdimlab(d, &["check", "--name", "k", "--n", "3", "--out", "o"]);
    assert_eq!(code(&out), 1);
    assert!(!out.stderr.is_empty());
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&gdimlab(d, &["preset", "thm42", "--r", "1", "--out", "o"])), 2);
    assert_eq!(code(&gdimlab(d, &["preset", "nonsense", "--out", "o"])), 2);
    gdimlab(d, &["ring", "--kind", "hypersurface", "--r", "4", "--name", "r4", "--out", "o"]);
    assert_eq!(code(&gdimlab(d, &["bass", "--ring", "r4", "--n", "6", "--out", "o"])), 2);
}

#[test]
fn tampered_ring_is_rejected_on_load() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    gdimlab(d, &["ring", "--kind", "circulant", "--r", "3", "--out", "o"]);
    let path = d.join("o/ring.json");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let t = &mut v["artifact"]["data"]["mult11"];
    t[0][1][0] = serde_json::json!(t[0][1][0].as_i64().unwrap() + 1);
    std::fs::write(&path, v.to_string()).unwrap();
    let out = gdimlab(d, &["module", "--kind", "residue", "--out", "o"]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn presets_are_reproducible_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for o in ["a", "b"] {
        let out = gdimlab(d, &["preset", "thm51", "--seed", "42", "--out", o]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["thm51.report.json", "thm51.csv", "thm51.sweep_r2.csv"] {
        let a = std::fs::read(d.join("a").join(f)).unwrap();
        let b = std::fs::read(d.join("b").join(f)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{f}");
    }
}
