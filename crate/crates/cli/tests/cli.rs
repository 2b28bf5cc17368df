use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qdsm(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdsm"))
        .args(args)
        .current_dir(cwd)
        .env_remove("QDSM_THREADS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path) -> String {
    let path = dir.join("run.json");
    fs::write(
        &path,
        r#"{
  "phantom": {"name": "gaussian_bump", "amplitude": [0.01, 0.0], "center": [0.0, 0.0], "decay": 100.0},
  "dim": 2,
  "geometry": {"kind": "far_field"},
  "directions": 32,
  "wavenumbers": {"k_min": 1.0, "k_max": 31.0, "n_k": 16},
  "forward": {"model": "born", "grid": {"min": -0.7, "max": 0.7, "count": 71}},
  "noise": {"delta": 0.05, "seed": 3},
  "sampling": {"min": -0.35, "max": 0.35, "count": 21},
  "output_dir": "out"
}
"#,
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn pipeline_writes_artifacts_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = qdsm(&["pipeline", "--config", &config], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("relative l2 error"), "{stdout}");
    for name in ["manifest.json", "measurements.bin", "reconstruction.bin", "truth.txt", "error_report.json"] {
        assert!(dir.path().join("out").join(name).exists(), "{name}");
    }
}

#[test]
fn synthesize_then_invert() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = qdsm(&["synthesize", "--config", &config, "--set", "output_dir=data"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = qdsm(
        &["invert", "--config", &config, "--set", "measurements=data/measurements.bin", "--set", "output_dir=rec"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("rec/reconstruction.bin").exists());
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    for args in [
        vec!["pipeline", "--config", config.as_str(), "--set", "directions=0"],
        vec!["pipeline", "--config", config.as_str(), "--set", "forward.grid.max=0.2"],
        vec!["pipeline", "--config", "missing.json"],
        vec!["invert", "--config", config.as_str()],
    ] {
        let out = qdsm(&args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
    assert!(!dir.path().join("out").exists());
}

#[test]
fn bad_thread_count_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_qdsm"))
        .args(["phantom", "--config", &config])
        .current_dir(dir.path())
        .env("QDSM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupt_measurements_fail() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    fs::write(dir.path().join("junk.bin"), b"not a measurement file").unwrap();
    let out = qdsm(&["invert", "--config", &config, "--set", "measurements=junk.bin"], dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn validate_reports_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = qdsm(&["validate", "--config", &config], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")), "{stdout}");
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/validation.json")).unwrap()).unwrap();
    assert!(report["checks"].as_array().unwrap().len() >= 10);
}

#[test]
fn phantom_renders_slices() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = qdsm(&["phantom", "--config", &config], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let ppm = fs::read_dir(dir.path().join("out"))
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "ppm"))
        .count();
    assert!(ppm >= 1);
}
