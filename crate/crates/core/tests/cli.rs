use std::path::Path;
use std::process::{Command, Output};

use qwrw::plot::Table;

fn qwrw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwrw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_defaults_reproduce_reference_program() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("reference.csv");
    let json = dir.path().join("reference.json");
    let out = qwrw(&["run", "--out-csv", path_str(&csv), "--out-json", path_str(&json)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("site,p0_qw,p1_qw,p0_rw,p1_rw\n"));
    let table = Table::parse(&text).unwrap();
    assert_eq!(table.rows.len(), 80);
    for row in &table.rows {
        assert!((row[1] - row[3]).abs() <= 1e-10);
        assert!((row[2] - row[4]).abs() <= 1e-10);
    }

    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    for key in [
        "energy",
        "population_re",
        "population_im",
        "leak",
        "moments",
        "residuals",
        "config_echo",
    ] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert!((report["energy"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
    assert!((report["population_re"].as_f64().unwrap() - 2.0).abs() <= 1e-12);
    assert_eq!(report["config_echo"]["start"], "40");
    assert_eq!(report["config_echo"]["init"], "rw:1+0.5i,0,0,1-0.5i");
}

#[test]
fn zero_steps_give_the_initial_point_mass() {
    let out = qwrw(&["run", "--d", "12", "--n", "0", "--init", "qw:1,0"]);
    assert!(out.status.success());
    let table = Table::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    for row in &table.rows {
        let expected = if row[0] == 6.0 { 1.0 } else { 0.0 };
        assert_eq!(row[1], expected);
        assert_eq!(row[3], expected);
        assert_eq!(row[2], 0.0);
    }
}

#[test]
fn long_run_emits_chain_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let svg = dir.path().join("rows.svg");
    let out = qwrw(&[
        "run",
        "--d",
        "256",
        "--n",
        "100",
        "--start",
        "128",
        "--init",
        "qw:1,0",
        "--rows",
        "--out-csv",
        path_str(&csv),
        "--out-svg",
        path_str(&svg),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = Table::parse(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(
        table.header,
        ["site", "p0_qw", "p1_qw", "p0_rw", "p1_rw", "row1", "row2", "row3", "row4"]
    );
    assert_eq!(table.rows.len(), 256);
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 8);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    let json = dir.path().join("r.json");
    std::fs::write(
        &cfg,
        format!(
            "# experiment\nd = 40\nn = 6\ninit = qw:0,1\nengine = both\nout_json = {}\n",
            json.display()
        ),
    )
    .unwrap();
    let out = qwrw(&["run", "--config", path_str(&cfg), "--n", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["config_echo"]["d"], "40");
    assert_eq!(report["config_echo"]["n"], "3");
    assert_eq!(report["config_echo"]["engine"], "both");
    assert!(report["residuals"]["engine_quantum_max_abs_diff"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn configuration_errors_exit_2() {
    assert_eq!(qwrw(&["run", "--d", "3"]).status.code(), Some(2));
    assert_eq!(qwrw(&["run", "--start", "0"]).status.code(), Some(2));
    assert_eq!(qwrw(&["run", "--init", "qw:1"]).status.code(), Some(2));
    assert_eq!(qwrw(&["run", "--engine", "gpu"]).status.code(), Some(2));
    assert_eq!(qwrw(&["run", "--config", "/nonexistent/cfg"]).status.code(), Some(2));
    assert_eq!(qwrw(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn dense_capacity_error_exits_3() {
    let out = qwrw(&["run", "--d", "100000", "--n", "1", "--engine", "dense"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_passes_and_fails_on_perturbed_b() {
    let out = qwrw(&["verify", "--sites", "4,8,16", "--steps", "0,1,5"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("PASS decomposition"));
    assert!(!stdout.contains("FAIL"));

    let out = qwrw(&["verify", "--sites", "4", "--steps", "1", "--perturb-b", "1e-6"]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("FAIL decomposition"));
}

#[test]
fn verify_default_sweep_passes() {
    let out = qwrw(&["verify"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn verify_is_reproducible_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = qwrw(&[
            "verify",
            "--sites",
            "8,16",
            "--steps",
            "5",
            "--seed",
            "17",
            "--out-json",
            path_str(p),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn plot_is_deterministic_and_rejects_empty_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let out = qwrw(&["run", "--d", "30", "--n", "8", "--out-csv", path_str(&csv)]);
    assert!(out.status.success());

    let svg1 = dir.path().join("a.svg");
    let svg2 = dir.path().join("b.svg");
    assert!(qwrw(&["plot", path_str(&csv), path_str(&svg1)]).status.success());
    assert!(qwrw(&["plot", path_str(&csv), path_str(&svg2)]).status.success());
    assert_eq!(std::fs::read(&svg1).unwrap(), std::fs::read(&svg2).unwrap());

    let subset = dir.path().join("c.svg");
    assert!(
        qwrw(&["plot", path_str(&csv), path_str(&subset), "--columns", "p0_qw,p0_rw"])
            .status
            .success()
    );
    assert_eq!(
        std::fs::read_to_string(&subset).unwrap().matches("<polyline").count(),
        2
    );

    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    let target = dir.path().join("never.svg");
    let out = qwrw(&["plot", path_str(&empty), path_str(&target)]);
    assert!(!out.status.success());
    assert!(!target.exists());
}

#[test]
fn run_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut blobs = Vec::new();
    for tag in ["x", "y"] {
        let csv = dir.path().join(format!("{tag}.csv"));
        let json = dir.path().join(format!("{tag}.json"));
        let out = qwrw(&[
            "run",
            "--d",
            "50",
            "--n",
            "12",
            "--seed",
            "3",
            "--out-csv",
            path_str(&csv),
            "--out-json",
            path_str(&json),
        ]);
        assert!(out.status.success());
        blobs.push((std::fs::read(&csv).unwrap(), std::fs::read(&json).unwrap()));
    }
    assert_eq!(blobs[0], blobs[1]);
}

#[test]
fn bench_smoke_and_dense_guard() {
    let out = qwrw(&["bench", "--sites", "100000", "--dense-sites", "64"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("matrix-free"));

    let out = qwrw(&["bench", "--sites", "1000", "--dense-sites", "100000"]);
    assert_eq!(out.status.code(), Some(3));
}
