//! End-to-end tests against the compiled binary: the determinism
//! acceptance criterion for `sweep`, the exit-code contract, and the
//! figure-data shapes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ar1-bounds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Byte-identical sweep output across worker counts {1, 4, 16} and
/// across two consecutive invocations with the same seed.
#[test]
fn criterion_09_sweep_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let grid = [
        "sweep", "--a0", "0.5,0.98,1.1", "--eps", "0.1,1", "--n", "5,25", "--runs", "2000",
        "--seed", "42",
    ];
    let mut outputs = Vec::new();
    for (label, workers) in [("w1", "1"), ("w4", "4"), ("w16", "16"), ("w4-again", "4")] {
        let path = dir.path().join(format!("{label}.csv"));
        let mut args: Vec<&str> = grid.to_vec();
        let path_str = path.to_str().unwrap().to_owned();
        args.extend(["--out", &path_str, "--workers", workers]);
        let out = run(&args);
        assert!(out.status.success(), "sweep failed: {}", stderr_of(&out));
        outputs.push(fs::read(&path).unwrap());
    }
    let identical = outputs.iter().all(|bytes| bytes == &outputs[0]);
    let rows = outputs[0].split(|&b| b == b'\n').count() - 2; // header + trailing newline
    println!(
        "acceptance: criterion-9 {} - {rows} rows byte-identical across workers 1/4/16 and repeat run",
        if identical { "PASS" } else { "FAIL" }
    );
    assert!(identical);
}

#[test]
fn bound_prints_single_json_object() {
    let out = run(&["bound", "stable-dev", "--a0", "0.5", "--eps", "1", "--n", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(v["kind"], "stable_deviation");
    assert_eq!(v["a0"], 0.5);
    assert_eq!(v["n"], 2);
    let value = v["value"].as_f64().unwrap();
    assert!((value - 0.8091067115702212).abs() < 1e-15, "value={value}");

    // eps = 0 asks for P(deviation > 0), which the bound caps at exactly 1
    let out = run(&["bound", "stable-dev", "--a0", "0.7", "--eps", "0", "--n", "50"]);
    let v: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().trim()).unwrap();
    assert_eq!(v["value"], 1.0);
}

#[test]
fn domain_errors_exit_2_with_named_precondition() {
    let out = run(&["bound", "unstable-var", "--a0", "1.1", "--n", "6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("N must be >= 7 for variance bounds"));

    let out = run(&["bound", "stable-dev", "--a0", "0.5", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("--eps is required"));

    let out = run(&["sweep", "--a0", "1.0", "--eps", "1", "--n", "5", "--out", "/tmp/x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("|a0| != 1"));

    let out = run(&["reproduce", "fig2", "--runs", "999"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains(">= 1000"));
}

#[test]
fn io_errors_exit_3_and_leave_no_partial_file() {
    let target = "/nonexistent-dir/grid.csv";
    let out = run(&["sweep", "--a0", "0.5", "--eps", "1", "--n", "2", "--out", target]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!Path::new(target).exists());

    let out = run(&["sweep", "--config", "/nonexistent-dir/sweep.cfg"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn injected_fault_fails_validation_and_names_the_check() {
    let out = run(&["validate", "--inject-fault", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("continuant-closed-vs-recursion"));

    let checks: Vec<serde_json::Value> =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().trim()).unwrap();
    assert_eq!(checks.len(), 14);
    let failing: Vec<&str> = checks
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["check"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["continuant-closed-vs-recursion"]);
    for c in &checks {
        assert!(c["tolerance"].is_number());
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("from_config.csv");
    let cfg_path = dir.path().join("sweep.cfg");
    fs::write(
        &cfg_path,
        format!(
            "# grid under version control\na0 = 0.5\neps = 1\nn = 2\nruns = 50\nout = {}\n",
            out_path.display()
        ),
    )
    .unwrap();

    let out = run(&["sweep", "--config", cfg_path.to_str().unwrap(), "--runs", "10"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let csv = fs::read_to_string(&out_path).unwrap();
    let data_row = csv.lines().nth(1).unwrap();
    let runs_col: u64 = data_row.split(',').nth(3).unwrap().parse().unwrap();
    assert_eq!(runs_col, 10, "flag must override the config value");
}

#[test]
fn reproduce_writes_figure_csvs_with_pinned_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("figs");
    let out = run(&[
        "reproduce", "fig2", "--runs", "1000", "--seed", "3",
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let mut bound_large_n = Vec::new();
    for a0 in ["0.5", "0.98", "1.01", "1.1"] {
        let text = fs::read_to_string(out_dir.join(format!("fig2_a0_{a0}.csv"))).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 25, "a0={a0}");
        assert_eq!(lines[0], "a0,N,runs,empirical_var,ci_low,ci_high,std_err,bound_var,regime");
        for row in &lines[1..] {
            let cols: Vec<&str> = row.split(',').collect();
            assert_eq!(cols.len(), 9);
            let n: u64 = cols[1].parse().unwrap();
            let bound: f64 = cols[7].parse().unwrap();
            if n == 538 {
                bound_large_n.push(bound);
            }
            if a0 == "0.5" {
                // the stable bound reduces to 8/(N-6) - 2/(N+2) at a0 = 0.5
                let nf = n as f64;
                let expected = 8.0 / (nf - 6.0) - 2.0 / (nf + 2.0);
                assert!((bound - expected).abs() <= 1e-12 * expected, "N={n}: {bound}");
            }
        }
    }
    // exponential prefactor: deeper instability tightens the bound
    assert_eq!(bound_large_n.len(), 4);
    assert!(bound_large_n[3] < bound_large_n[2], "bound(1.1) < bound(1.01) at large N");

    let out = run(&[
        "reproduce", "fig1", "--runs", "1000", "--seed", "3",
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    for a0 in ["0.5", "0.98", "1.01", "1.1"] {
        let text = fs::read_to_string(out_dir.join(format!("fig1_a0_{a0}.csv"))).unwrap();
        assert_eq!(text.lines().count(), 1 + 20 * 13, "a0={a0}");
    }
}
