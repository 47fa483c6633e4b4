//! End-to-end checks of the `ductflow` binary: exit codes, artefacts on
//! disk, and the text it prints.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ductflow"))
}

fn cfg(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn run_writes_profile_and_steps() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--config"])
        .arg(cfg("contact-advect.cfg"))
        .args(["--cells", "40", "--t-final", "0.05", "--plot-script", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("40 cells"));
    for name in ["profile.csv", "steps.csv", "plot.py"] {
        assert!(dir.path().join(name).exists(), "missing {name}");
    }
    let profile = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert!(profile.starts_with("x,rho,u,p,phi,a,e,s,mach\n"));
    assert_eq!(profile.lines().count(), 41);
}

#[test]
fn exact_samples_the_reference_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["exact", "--config"])
        .arg(cfg("two-fluid-duct.cfg"))
        .args(["--time", "0.2", "--samples", "50", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("exact.csv")).unwrap();
    assert_eq!(text.lines().count(), 51);
}

#[test]
fn compare_reports_zero_for_identical_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let run = bin()
        .args(["run", "--config"])
        .arg(cfg("sod.cfg"))
        .args(["--cells", "30", "--t-final", "0.02", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(run.status.success(), "stderr: {}", stderr(&run));
    let profile = dir.path().join("profile.csv");

    let human = bin()
        .arg("compare")
        .arg(&profile)
        .arg(&profile)
        .output()
        .unwrap();
    assert!(human.status.success());
    let text = stdout(&human);
    assert!(text.contains("rho"), "{text}");
    assert!(text.contains("30 rows"), "{text}");

    let json = bin()
        .arg("compare")
        .arg(&profile)
        .arg(&profile)
        .arg("--json")
        .output()
        .unwrap();
    assert!(json.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(parsed["n_rows"], 30);
    assert_eq!(parsed["rho"]["l1"], 0.0);
}

#[test]
fn invalid_config_exits_2_and_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.cfg");
    std::fs::write(&path, "domain.x_min = 0\nmystery.key = 1\n").unwrap();
    let out = bin()
        .args(["run", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("mystery.key"), "{err}");
    assert!(err.contains("time.t_final"), "{err}");
}

#[test]
fn missing_config_file_exits_3() {
    let out = bin()
        .args(["run", "--config", "/nonexistent/nowhere.cfg"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("nowhere.cfg"));
}

#[test]
fn wb_check_passes_on_the_steady_nozzle() {
    let out = bin()
        .args(["wb-check", "--config"])
        .arg(cfg("wb-nozzle.cfg"))
        .args(["--steps", "10"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn wb_check_fails_on_a_transient_flow_with_exit_3() {
    let out = bin()
        .args(["wb-check", "--config"])
        .arg(cfg("sod.cfg"))
        .args(["--steps", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn reruns_are_byte_identical() {
    let once = |dir: &Path| {
        let out = bin()
            .args(["run", "--config"])
            .arg(cfg("contact-advect.cfg"))
            .args(["--cells", "50", "--t-final", "0.1", "--out"])
            .arg(dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", stderr(&out));
        (
            std::fs::read(dir.join("profile.csv")).unwrap(),
            std::fs::read(dir.join("steps.csv")).unwrap(),
        )
    };
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let (p1, s1) = once(d1.path());
    let (p2, s2) = once(d2.path());
    assert_eq!(p1, p2);
    assert_eq!(s1, s2);
}
