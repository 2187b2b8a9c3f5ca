//! End-to-end runs of the `vacuum-euler` binary.

use std::path::Path;
use std::process::Command;

use vacuum_euler::cli::Scenario;

const AFFINE: &str = r#"
[data]
profile = "quadratic"
A = 1.0
velocity = "affine"
beta = 0.1
delta = -0.05

[solver]
method = "mol"
kappa = 0.0
dt = 1e-4
t_final = 0.005

[experiment]
kind = "single-run"
output_dir = "unused"
"#;

fn run(dir: &Path, text: &str) -> std::process::Output {
    let cfg = dir.join("scenario.toml");
    std::fs::write(&cfg, text).unwrap();
    Command::new(env!("CARGO_BIN_EXE_vacuum-euler"))
        .args(["run", cfg.to_str().unwrap(), "--threads", "2", "--output-dir"])
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

#[test]
fn single_run_writes_hashed_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), AFFINE);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let hash = Scenario::from_toml_str(AFFINE).unwrap().hash;
    for name in ["trajectory.csv", "energy.csv"] {
        let text = std::fs::read_to_string(dir.path().join("out").join(name)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), format!("# config_hash={hash}"));
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(header[0], "t");
        for line in lines {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells.len(), header.len());
            assert!(cells.iter().all(|c| c.parse::<f64>().is_ok()));
        }
    }
    assert!(dir.path().join("out/report.txt").exists());
}

#[test]
fn missing_field_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &AFFINE.replace("t_final = 0.005", ""));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t_final"));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &AFFINE.replace("dt = 1e-4", "dt = 1e-4\nstep = 2"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn leaving_the_flow_window_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = AFFINE
        .replace("beta = 0.1", "beta = -4.0")
        .replace("delta = -0.05", "delta = 2.0")
        .replace("t_final = 0.005", "t_final = 0.3");
    let out = run(dir.path(), &text);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn hardy_suite_needs_no_solver() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        "[experiment]\nkind = \"hardy-suite\"\noutput_dir = \"unused\"\n",
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("out/hardy.csv")).unwrap();
    // 12 members × 3 orders, hash and header
    assert_eq!(text.lines().count(), 38);
}

#[test]
fn bundled_scenarios_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        Scenario::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
