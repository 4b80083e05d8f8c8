use std::f64::consts::{LN_2, PI};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use approx::assert_relative_eq;
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macroball"))
        .args(args)
        .current_dir(dir)
        .env_remove("MACROBALL_CONFIG")
        .output()
        .unwrap()
}

fn run(args: &[&str]) -> Output {
    run_in(&root(), args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(o: &Output) -> Vec<(f64, f64)> {
    let text = stdout(o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("R,value"));
    lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect()
}

#[test]
fn constants_dim_two() {
    let out = run(&["constants", "--dim", "2", "--out", "-"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_relative_eq!(
        doc["alpha_n"].as_f64().unwrap(),
        6.815e-3,
        max_relative = 1e-3
    );
    assert_eq!(doc["dim"], 2);
    assert_eq!(doc["f_sup"]["at_infinity"], false);
    assert_eq!(doc["provenance"]["c_prime_n"], "external");
    assert_eq!(doc["config_digest"].as_str().unwrap().len(), 64);

    let keys = [
        "\"dim\"",
        "\"V_n\"",
        "\"f_sup\"",
        "\"C_n\"",
        "\"alpha_n\"",
        "\"c_n\"",
        "\"c_prime_n\"",
        "\"c_triple_prime_n\"",
        "\"lambda_n\"",
        "\"lambda_clamped\"",
        "\"beta_n\"",
        "\"entropy_threshold_ratio\"",
        "\"isoembolic_coefficient\"",
        "\"provenance\"",
        "\"config_digest\"",
    ];
    let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "key order");
    assert!(text.contains("\"V_n\": 3.1415926535897931e0"));
}

#[test]
fn constants_are_byte_deterministic_and_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = run(&["constants", "--dim", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn missing_simplex_volume_exits_two() {
    let out = run(&["constants", "--dim", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("ideal_simplex_vol_override[4]"));
}

#[test]
fn missing_croke_constant_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["constants", "--dim", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("croke_cprime[2]"));
}

#[test]
fn config_from_environment_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(
        &cfg,
        "[external_constants.croke_cprime]\n\"4\" = 0.26\n[external_constants.ideal_simplex_vol_override]\n\"4\" = 0.2689\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_macroball"))
        .args(["constants", "--dim", "4"])
        .current_dir(dir.path())
        .env("MACROBALL_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["V_n"].as_f64(), Some(0.2689));
    assert_eq!(doc["provenance"]["V_n"], "external");

    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    let bad = run(&["constants", "--dim", "2", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn thresholds_for_a_genus_two_surface() {
    let vol = format!("{}", 4.0 * PI);
    let out = run(&["thresholds", "--dim", "2", "--vol-hyp", &vol]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_relative_eq!(
        doc["simplicial_volume"].as_f64().unwrap(),
        4.0,
        max_relative = 1e-12
    );
    assert_eq!(doc["simplicial_volume_derived"], true);
    let none = run(&["thresholds", "--dim", "2"]);
    assert_eq!(none.status.code(), Some(2));
}

#[test]
fn f_curve_small_radius() {
    let out = run(&[
        "curve",
        "--which",
        "f",
        "--dim",
        "2",
        "--r-min",
        "0.01",
        "--r-max",
        "100",
        "--samples",
        "500",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 500);
    assert_eq!(rows[0].0, 0.01);
    assert_eq!(rows[499].0, 100.0);
    assert_relative_eq!(rows[0].1, 12.0 * LN_2 / 0.01, max_relative = 1e-4);
    assert!(rows.windows(2).all(|w| w[1].0 > w[0].0));
}

#[test]
fn g_curve_stays_above_one() {
    let out = run(&[
        "curve", "--which", "g", "--dim", "2", "--r-min", "2", "--r-max", "200", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(csv_rows(&out).iter().all(|&(_, g)| g >= 1.0 - 1e-9));
}

#[test]
fn v_hyp_curve_matches_closed_form() {
    let out = run(&[
        "curve",
        "--which",
        "v-hyp",
        "--dim",
        "3",
        "--r-min",
        "0.1",
        "--r-max",
        "10",
        "--samples",
        "50",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for (r, v) in csv_rows(&out) {
        assert_relative_eq!(v, PI * ((2.0 * r).sinh() - 2.0 * r), max_relative = 1e-9);
    }
}

#[test]
fn curve_json_and_bad_range() {
    let out = run(&[
        "curve",
        "--which",
        "lambda-integrand",
        "--dim",
        "3",
        "--r-min",
        "1",
        "--r-max",
        "50",
        "--samples",
        "5",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc.as_array().unwrap().len(), 5);

    let bad = run(&[
        "curve", "--which", "f", "--dim", "2", "--r-min", "5", "--r-max", "1",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    let few = run(&[
        "curve",
        "--which",
        "f",
        "--dim",
        "2",
        "--r-min",
        "1",
        "--r-max",
        "2",
        "--samples",
        "1",
    ]);
    assert_eq!(few.status.code(), Some(2));
}

#[test]
fn kernel_check_passes_at_example_point() {
    let out = run(&[
        "kernel-check",
        "--dim",
        "2",
        "--lambda",
        "3",
        "--R",
        "2",
        "--fd-step",
        "1e-3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["summary"]["fail"], 0);
    assert_eq!(doc["summary"]["skipped"], 0);
    assert_eq!(doc["checks"].as_array().unwrap().len(), 5);
}

#[test]
fn kernel_check_skips_fd_above_three_dimensions() {
    let out = run(&["kernel-check", "--dim", "5", "--lambda", "2", "--R", "2"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let checks = doc["checks"].as_array().unwrap();
    let fd = checks.last().unwrap();
    assert_eq!(fd["status"], "skipped");
    assert!(fd["detail"].as_str().unwrap().contains("UnsupportedDim"));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn kernel_check_error_codes() {
    let neg = run(&[
        "kernel-check",
        "--dim",
        "2",
        "--lambda",
        "-1",
        "--R",
        "2",
        "--fd-step",
        "1e-3",
    ]);
    assert_eq!(neg.status.code(), Some(2));
    let degenerate = run(&[
        "kernel-check",
        "--dim",
        "2",
        "--lambda",
        "5e-324",
        "--R",
        "1",
    ]);
    assert_eq!(degenerate.status.code(), Some(3));
    let big_step = run(&[
        "kernel-check",
        "--dim",
        "2",
        "--lambda",
        "3",
        "--R",
        "2",
        "--fd-step",
        "0.5",
    ]);
    assert_eq!(big_step.status.code(), Some(2));
}

#[test]
fn verify_kernel_suite_only() {
    let out = run(&["verify", "--suite", "kernel"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let ids: Vec<&str> = doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["C04", "C05", "C06"]);
    assert_eq!(doc["suite"], "kernel");
    assert!(stderr(&out).contains("3 passed, 0 failed"));
}

#[test]
fn verify_with_unattainable_tolerance_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.toml");
    std::fs::write(&cfg, "[tolerances]\nquad_rel = 1e-16\n").unwrap();
    let out = run(&[
        "verify",
        "--suite",
        "hypgeom",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["checks"][0]["id"], "C01");
    assert_eq!(doc["checks"][0]["status"], "fail");
    assert!(doc["checks"][0]["lhs"].is_null());
    assert!(doc["checks"][0]["detail"]
        .as_str()
        .unwrap()
        .contains("tolerance"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["constants"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify", "--suite", "everything"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["constants", "--dim", "1"]).status.code(), Some(2));
    assert_eq!(
        run(&["constants", "--dim", "2", "--format", "csv"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
