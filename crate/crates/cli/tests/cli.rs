use std::path::Path;
use std::process::{Command, Output};

fn ggwpd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggwpd")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const CHAOTIC: &str = r#"{"name": "small", "K": 8.25, "t": 2, "alpha_center": [0.0, 0.0], "beta_center": [0.0, 0.5],
    "N_list": [50, 100, 300], "regime": "chaotic", "image_range": 3}"#;

#[test]
fn chaotic_preset_sweep_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = ggwpd(&["sweep", "--preset", "chaotic-fig6", "--out", "res"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let csv = std::fs::read_to_string(dir.path().join("res/chaotic-fig6.csv")).unwrap();
    assert_eq!(csv.lines().count(), 15);
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 14);
    let report = std::fs::read_to_string(dir.path().join("res/chaotic-fig6-report.txt")).unwrap();
    assert!(!report.contains("FAIL"));
}

#[test]
fn exit_status_follows_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = ggwpd(&["sweep", "--preset", "integrable-fig2"], dir.path());
    let text = stdout(&out);
    assert!(text.contains("saddle (0.8019843"));
    let failed = text.lines().any(|l| l.starts_with("FAIL"));
    assert_eq!(out.status.code(), Some(if failed { 1 } else { 0 }), "{text}");
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CHAOTIC);
    let out = ggwpd(&["sweep", "--config", &cfg, "--tol", "1e-13", "--image-range", "3"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(dir.path().join("small.csv").exists());
    // windings beyond one drop three of the eight branches
    let out = ggwpd(&["saddle", "--config", &cfg, "--image-range", "1"], dir.path());
    assert!(stdout(&out).starts_with("5 branch(es)"), "{}", stdout(&out));
    let out = ggwpd(&["saddle", "--config", &cfg], dir.path());
    assert!(stdout(&out).starts_with("8 branch(es)"), "{}", stdout(&out));
}

#[test]
fn repeated_sweeps_write_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CHAOTIC);
    let mut files = vec![];
    for run in ["a", "b"] {
        assert_eq!(ggwpd(&["sweep", "--config", &cfg, "--out", run], dir.path()).status.code(), Some(0));
        files.push(std::fs::read(dir.path().join(run).join("small.csv")).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ggwpd(&[], dir.path()).status.code(), Some(2));
    assert_eq!(ggwpd(&["sweep"], dir.path()).status.code(), Some(2));
    assert_eq!(ggwpd(&["sweep", "--preset", "fig11"], dir.path()).status.code(), Some(2));
    assert_eq!(ggwpd(&["sweep", "--config", "missing.json"], dir.path()).status.code(), Some(2));
    let cfg = write_config(dir.path(), r#"{"K": 1.0, "t": 2, "alpha_center": [0, 0]}"#);
    assert_eq!(ggwpd(&["sweep", "--config", &cfg], dir.path()).status.code(), Some(2));
    assert_eq!(ggwpd(&["sweep", "--preset", "chaotic-fig6", "--tol", "-1"], dir.path()).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = ggwpd(&["sweep", "--preset", "chaotic-fig6", "--max-iter", "1"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
    let out = ggwpd(&["saddle", "--preset", "chaotic-fig6", "--max-iter", "1"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn saddle_prints_complex_initial_conditions() {
    let dir = tempfile::tempdir().unwrap();
    let out = ggwpd(&["saddle", "--preset", "integrable-fig2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("P0 = +0.80198426"), "{text}");
    assert!(text.contains("Q0 = +0.20628299"), "{text}");
}

#[test]
fn manifolds_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = ggwpd(&["manifolds", "--preset", "integrable-fig2", "--out", "curves"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    for name in ["shear-initial", "shear-propagated"] {
        let text = std::fs::read_to_string(dir.path().join(format!("curves/integrable-fig2-{name}.csv"))).unwrap();
        assert_eq!(text.lines().next(), Some("index,p,q"));
        assert!(text.lines().count() > 10);
    }
}
