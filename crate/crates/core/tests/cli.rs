use std::fs;
use std::process::{Command, Output};

use polaron_harvest::cli::{parse_config, RunManifest};

fn harvest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harvest")).args(args).env_remove("HARVEST_THREADS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn derive_prints_table() {
    let o = harvest(&["derive"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let xi: f64 =
        text.lines().find(|l| l.starts_with("xi ")).unwrap().split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((xi - 122.6).abs() < 0.1);
}

#[test]
fn sweep_writes_files_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run/fig2");
    let o = harvest(&["sweep", "--preset", "fig2", "--out", out.to_str().unwrap(), "--threads", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let run = dir.path().join("run");
    let manifest = RunManifest::from_json(&fs::read_to_string(run.join("fig2.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.command, "sweep");
    let csv = fs::read_to_string(run.join("fig2_T0.065ms.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), format!("# manifest_sha256={}", manifest.config_sha256));
    assert_eq!(csv.lines().count(), 2 + 81);
    let dat = fs::read_to_string(run.join("fig2.dat")).unwrap();
    assert_eq!(dat.lines().nth(1).unwrap().split_whitespace().count(), 4);
    assert!(stdout(&o).contains("T = 0.065 ms: peak negativity"));
}

#[test]
fn manifest_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("in.cfg");
    fs::write(&cfg_path, "[impurity]\nomega = 30 krad/s\n[geometry]\nL_ratio = 4\n").unwrap();
    let first = dir.path().join("a");
    let o = harvest(&["response", "--config", cfg_path.to_str().unwrap(), "--out", first.to_str().unwrap()]);
    assert!(o.status.success());
    let manifest = RunManifest::from_json(&fs::read_to_string(dir.path().join("a.manifest.json")).unwrap()).unwrap();
    assert!(parse_config(&manifest.config).is_ok());
    let replay = dir.path().join("replay.cfg");
    fs::write(&replay, &manifest.config).unwrap();
    let second = dir.path().join("b");
    assert!(harvest(&["response", "--config", replay.to_str().unwrap(), "--out", second.to_str().unwrap()])
        .status
        .success());
    assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("b.csv")).unwrap());
}

#[test]
fn config_errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text, needle) in [
        ("hz.cfg", "[impurity]\nomega = 5 kHz\n", "kHz"),
        ("bare.cfg", "[protocol]\nT = 0.065\n", "T"),
        ("unknown.cfg", "[protocol]\nwidth = 3 ms\n", "width"),
    ] {
        let path = dir.path().join(name);
        fs::write(&path, text).unwrap();
        let o = harvest(&["derive", "--config", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(String::from_utf8_lossy(&o.stderr).contains(needle), "{name}");
    }
}

#[test]
fn validate_exit_status_follows_checks() {
    assert!(harvest(&["validate"]).status.success());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cut.cfg");
    fs::write(&path, "[command]\nk_cut_factor = 0.1\n").unwrap();
    let o = harvest(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL healing_fraction_M_minus"));
}

#[test]
fn threads_env_fallback() {
    let a = Command::new(env!("CARGO_BIN_EXE_harvest"))
        .args(["sweep", "--preset", "fig4"])
        .env("HARVEST_THREADS", "1")
        .output()
        .unwrap();
    let b = harvest(&["sweep", "--preset", "fig4", "--threads", "4"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let bad =
        Command::new(env!("CARGO_BIN_EXE_harvest")).args(["derive"]).env("HARVEST_THREADS", "many").output().unwrap();
    assert!(!bad.status.success());
}
