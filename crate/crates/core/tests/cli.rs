//! End-to-end runs of the `subdd` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn subdd(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subdd"))
        .args(args)
        .env("SUBDD_OUTPUT_DIR", root)
        .env_remove("RUST_LOG")
        .output()
        .unwrap()
}

fn tempdir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("subdd-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn solve_writes_history_and_manifest() {
    let root = tempdir("solve");
    let out = subdd(&root, &["run", "--level", "4", "--n-ov", "3", "--tol", "1e-10", "--output", "g2s"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let history = fs::read_to_string(root.join("g2s/history_g2s.csv")).unwrap();
    let mut lines = history.lines();
    assert_eq!(lines.next(), Some("# seed=0"));
    assert!(lines.next().unwrap().starts_with("method,level,n_ov,n1,n2,coarse,iteration,rel_error"));
    let last = history.lines().last().unwrap();
    let rel_error: f64 = last.split(',').nth(7).unwrap().parse().unwrap();
    assert!(rel_error <= 1e-10);
    let manifest = fs::read_to_string(root.join("g2s/manifest.txt")).unwrap();
    assert!(manifest.contains("method = g2s"));
}

#[test]
fn histories_are_deterministic() {
    let root = tempdir("determinism");
    let args = ["run", "--method", "s2s", "--coarse", "pca:3", "--level", "4", "--seed", "9"];
    let a = subdd(&root, &[&args[..], &["--output", "a"]].concat());
    let b = subdd(&root, &[&args[..], &["--output", "b"]].concat());
    assert!(a.status.success() && b.status.success());
    let ha = fs::read_to_string(root.join("a/history_s2s.csv")).unwrap();
    let hb = fs::read_to_string(root.join("b/history_s2s.csv")).unwrap();
    assert_eq!(ha, hb);
    assert!(ha.starts_with("# seed=9\n"));
}

#[test]
fn invalid_configuration_exits_with_two_and_writes_nothing() {
    let root = tempdir("invalid");
    for args in [
        &["run", "--level", "1", "--output", "bad"][..],
        &["run", "--set", "colour=blue", "--output", "bad"][..],
        &["run", "--method", "g2s", "--coarse", "fourier:3", "--output", "bad"][..],
        &["reproduce", "no_such_recipe"][..],
    ] {
        let out = subdd(&root, args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    }
    assert_eq!(fs::read_dir(&root).unwrap().count(), 0);
}

#[test]
fn config_file_and_flags_combine() {
    let root = tempdir("config");
    let cfg = root.join("exp.cfg");
    fs::write(&cfg, "# spectra of the unit problem\nmode = spectra\nlevel = 6\nn_ov = 3\n").unwrap();
    let out = subdd(&root, &["run", "--config", cfg.to_str().unwrap(), "--level", "4", "--output", "spec"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let spectra = fs::read_to_string(root.join("spec/spectra.csv")).unwrap();
    assert!(spectra.lines().nth(1).unwrap().starts_with("operator,n_ov,level"));
    assert!(spectra.lines().skip(2).all(|l| l.split(',').nth(2) == Some("4")));
}

#[test]
fn theory_table_lists_modes() {
    let root = tempdir("theory");
    let out = subdd(&root, &["run", "--mode", "theory-table", "--output", "th"]);
    assert!(out.status.success());
    let table = fs::read_to_string(root.join("th/theory.csv")).unwrap();
    assert_eq!(table.lines().count(), 2 + 10);
}

#[test]
fn output_root_flag_overrides_environment() {
    let env_root = tempdir("env");
    let flag_root = tempdir("flag");
    let out = subdd(
        &env_root,
        &["run", "--mode", "theory-table", "--output-root", flag_root.to_str().unwrap(), "--output", "t"],
    );
    assert!(out.status.success());
    assert!(flag_root.join("t/theory.csv").exists());
    assert!(!env_root.join("t").exists());
}
