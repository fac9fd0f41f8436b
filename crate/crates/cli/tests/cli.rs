//! End-to-end tests of the `strainflow` binary: exit codes, CSV shape,
//! determinism across job counts, and the sweep continuity property.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const UNIT_R: f64 = 1.5819767068693265;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_strainflow"))
}

fn coarse_config(r0x: f64, r0y: f64, t_max: f64) -> String {
    format!(
        r#"{{
  "lambda": 1.0, "mu_s": 1.0,
  "strains": [
    {{"name": "x", "mu": [[0.0, 8.0, 1.0]], "beta": [[0.0, 1.0, {bx}]]}},
    {{"name": "y", "mu": [[0.0, 8.0, 1.0]], "beta": [[0.0, 1.0, {by}]]}}
  ],
  "grid": {{"a_max": 8.0, "da": 0.05}},
  "sim": {{"t_max": {t_max}, "dt_lock": true, "record_every": 20}},
  "initial": {{"preset": "generic", "m_x": 0.1, "m_y": 0.1}}
}}"#,
        bx = r0x * UNIT_R,
        by = r0y * UNIT_R,
    )
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(out: Output) -> (i32, String, String) {
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn simulate_emits_fixed_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.json", &coarse_config(2.0, 0.9, 60.0));
    let (code, stdout, _) = run(bin().arg("simulate").arg(&cfg).output().unwrap());
    assert_eq!(code, 0);
    let mut lines = stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,S,mass_x,foi_x,mass_y,foi_y,dist_E0,dist_E1"
    );
    // 60/0.05 = 1200 steps recorded every 20, plus t = 0
    assert_eq!(lines.count(), 61);
    let second = stdout.lines().nth(1).unwrap();
    assert!(second.starts_with("0,0.5,"), "first row: {second}");
}

#[test]
fn validation_failures_exit_one_with_named_invariant() {
    let dir = tempfile::tempdir().unwrap();
    // beta identically zero violates the transmission assumption
    let bad = coarse_config(2.0, 0.9, 60.0).replace(
        &format!("{}", 0.9 * UNIT_R),
        "0.0",
    );
    let cfg = write(dir.path(), "bad.json", &bad);
    let (code, _, stderr) = run(bin().arg("simulate").arg(&cfg).output().unwrap());
    assert_eq!(code, 1);
    assert!(
        stderr.contains("transmission rate must not vanish"),
        "stderr: {stderr}"
    );

    // dt_lock = false rejected
    let bad = coarse_config(2.0, 0.9, 60.0).replace("\"dt_lock\": true", "\"dt_lock\": false");
    let cfg = write(dir.path(), "bad2.json", &bad);
    let (code, _, stderr) = run(bin().arg("simulate").arg(&cfg).output().unwrap());
    assert_eq!(code, 1);
    assert!(stderr.contains("dt_lock"), "stderr: {stderr}");
}

#[test]
fn equilibria_and_spectral_print_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.json", &coarse_config(2.0, 0.9, 60.0));
    let (code, stdout, _) = run(bin().arg("equilibria").arg(&cfg).output().unwrap());
    assert_eq!(code, 0);
    assert!(stdout.contains("E0") && stdout.contains("E1"));
    assert!(!stdout.contains("E2"), "subcritical strain has no endemic state");

    let (code, stdout, _) = run(bin().arg("spectral").arg(&cfg).output().unwrap());
    assert_eq!(code, 0);
    assert!(stdout.contains("E0: unstable"));
    assert!(stdout.contains("E1: L.A.S."));
}

#[test]
fn lyapunov_audit_reports_and_exits_zero_when_clean() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sub.json", &coarse_config(0.8, 0.9, 60.0));
    let out_csv = dir.path().join("lyap.csv");
    let (code, stdout, _) = run(
        bin()
            .args(["lyapunov", cfg.to_str().unwrap(), "--functional", "L0"])
            .arg("--out")
            .arg(&out_csv)
            .output()
            .unwrap(),
    );
    assert_eq!(code, 0);
    assert!(stdout.contains("0 violations"), "stdout: {stdout}");
    assert!(stdout.contains("guaranteed"), "stdout: {stdout}");
    let csv = fs::read_to_string(&out_csv).unwrap();
    assert!(csv.lines().next().unwrap().ends_with(",L0"));

    // mismatched regime is allowed but flagged
    let cfg = write(dir.path(), "sup.json", &coarse_config(2.0, 0.9, 60.0));
    let (code, stdout, _) = run(
        bin()
            .args(["lyapunov", cfg.to_str().unwrap(), "--functional", "L0"])
            .output()
            .unwrap(),
    );
    assert_eq!(code, 0);
    assert!(stdout.contains("no guarantee"), "stdout: {stdout}");
}

#[test]
fn matrix_is_deterministic_across_job_counts_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfgs = dir.path().join("rows");
    fs::create_dir(&cfgs).unwrap();
    write(&cfgs, "a.json", &coarse_config(0.8, 0.9, 200.0));
    write(&cfgs, "b.json", &coarse_config(2.0, 0.9, 200.0));

    let run_matrix = |jobs: Option<&str>, env_jobs: Option<&str>, out: &Path| -> i32 {
        let mut cmd = bin();
        cmd.arg("matrix").arg(&cfgs).arg("--out").arg(out);
        if let Some(j) = jobs {
            cmd.args(["--jobs", j]);
        }
        match env_jobs {
            Some(j) => cmd.env("STRAINFLOW_JOBS", j),
            None => cmd.env_remove("STRAINFLOW_JOBS"),
        };
        run(cmd.output().unwrap()).0
    };

    let out1 = dir.path().join("m1.csv");
    let out2 = dir.path().join("m2.csv");
    let out3 = dir.path().join("m3.csv");
    assert_eq!(run_matrix(Some("1"), None, &out1), 0);
    assert_eq!(run_matrix(Some("3"), None, &out2), 0);
    assert_eq!(run_matrix(None, Some("2"), &out3), 0);
    let b1 = fs::read(&out1).unwrap();
    assert_eq!(b1, fs::read(&out2).unwrap(), "bytes differ across --jobs");
    assert_eq!(b1, fs::read(&out3).unwrap(), "bytes differ via env jobs");

    // garbage in the env var is a named validation error
    let mut cmd = bin();
    cmd.arg("matrix")
        .arg(&cfgs)
        .env("STRAINFLOW_JOBS", "many");
    let (code, _, stderr) = run(cmd.output().unwrap());
    assert_eq!(code, 1);
    assert!(stderr.contains("STRAINFLOW_JOBS"), "stderr: {stderr}");
}

#[test]
fn matrix_reports_nonconvergence_with_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfgs = dir.path().join("rows");
    fs::create_dir(&cfgs).unwrap();
    // horizon far too short to converge
    write(&cfgs, "a.json", &coarse_config(2.0, 0.9, 6.0));
    let (code, stdout, stderr) = run(
        bin()
            .arg("matrix")
            .arg(&cfgs)
            .args(["--window", "3"])
            .output()
            .unwrap(),
    );
    assert_eq!(code, 3, "stdout: {stdout}\nstderr: {stderr}");
    assert!(stderr.contains("did not converge"), "stderr: {stderr}");
}

#[test]
fn sweep_limits_change_only_at_threshold_crossings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.json", &coarse_config(1.2, 0.8, 200.0));
    let (code, stdout, stderr) = run(
        bin()
            .args([
                "sweep",
                cfg.to_str().unwrap(),
                "--param",
                "lambda",
                "--range",
                "0.4:2.0:5",
                "--jobs",
                "2",
            ])
            .output()
            .unwrap(),
    );
    assert_eq!(code, 0, "stderr: {stderr}");
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "param,value,R0_x,R0_y,regime,ic,observed,alpha,final_distance,converged");
    assert_eq!(lines.len(), 6);

    // classified limit is constant within each regime segment
    let mut segments: Vec<(String, String)> = Vec::new();
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        let (regime, observed, converged) = (cols[4], cols[6], cols[9]);
        assert_eq!(converged, "true", "line: {line}");
        segments.push((regime.to_string(), observed.to_string()));
    }
    for w in segments.windows(2) {
        if w[0].0 == w[1].0 {
            assert_eq!(w[0].1, w[1].1, "limit changed without a regime change");
        }
    }
    // and the sweep does cross thresholds
    assert!(segments.iter().any(|s| s.1 == "E0"));
    assert!(segments.iter().any(|s| s.1 == "E1"));
}
