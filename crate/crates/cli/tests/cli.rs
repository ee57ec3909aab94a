//! End-to-end tests of the `burgers` binary: exit-code contract,
//! manifest completeness, artifact shapes, and byte determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_burgers"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const LAX: &str = r#"{
  "spec": {"kind": "separable_forced", "potential_coeffs": []},
  "grid": {"n": 128, "m": 16},
  "initial": {"kind": "fourier", "mean": 0.3, "modes": [{"k": 1, "amp_sin": 0.5}]},
  "experiment": {"n_periods": 3}
}"#;

const PENDULUM: &str = r#"{
  "spec": {"kind": "separable_forced",
           "potential_coeffs": [{"k_x": 1, "k_t": 1, "amp_cos": 0.2, "amp_sin": 0.0}]},
  "grid": {"n": 128, "m": 16},
  "initial": {"kind": "fourier", "mean": 0.0, "modes": [{"k": 1, "amp_sin": 0.3}]},
  "experiment": {"n_periods": 40, "periods": [4, 8, 12]}
}"#;

const ALPHA: &str = r#"{
  "spec": {"kind": "separable_forced", "potential_coeffs": []},
  "grid": {"n": 64, "m": 16},
  "experiment": {"n_periods": 32, "c_grid": [0.0, 0.25, 0.5]}
}"#;

#[test]
fn evolve_declares_every_artifact_in_the_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "lax.json", LAX);
    let out = tmp.path().join("out");
    let r = run(&["evolve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&r.stderr));
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "evolve");
    assert!(manifest["config_hash"].as_str().unwrap().starts_with("sha256:"));
    let files: Vec<String> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    let mut expected: Vec<String> = (0..=3).map(|k| format!("snapshot_{k:04}.csv")).collect();
    expected.push("series.csv".to_string());
    assert_eq!(files, expected);
    for f in &files {
        assert!(out.join(f).exists(), "declared file {f} missing");
    }
    let snap = fs::read_to_string(out.join("snapshot_0000.csv")).unwrap();
    assert!(snap.starts_with("x,value\n"));
    assert_eq!(snap.lines().count(), 129);
    assert!(!snap.contains('\r'));
}

#[test]
fn alpha_curve_matches_the_parabola_and_is_deterministic_across_jobs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "alpha.json", ALPHA);
    let out1 = tmp.path().join("a");
    let out2 = tmp.path().join("b");
    let r1 =
        run(&["alpha-curve", "--config", &cfg, "--out", out1.to_str().unwrap(), "--jobs", "1"]);
    let r2 =
        run(&["alpha-curve", "--config", &cfg, "--out", out2.to_str().unwrap(), "--jobs", "3"]);
    assert_eq!(r1.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&r1.stderr));
    assert_eq!(r2.status.code(), Some(0));
    let csv1 = fs::read(out1.join("alpha_curve.csv")).unwrap();
    let csv2 = fs::read(out2.join("alpha_curve.csv")).unwrap();
    assert_eq!(csv1, csv2, "alpha-curve output depends on --jobs");
    assert_eq!(
        fs::read(out1.join("manifest.json")).unwrap(),
        fs::read(out2.join("manifest.json")).unwrap()
    );
    let text = String::from_utf8(csv1).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("c,alpha,alpha_stderr,rho,T"));
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 5);
        let c: f64 = cells[0].parse().unwrap();
        let alpha: f64 = cells[1].parse().unwrap();
        assert!((alpha - 0.5 * c * c).abs() <= 1e-3, "alpha({c}) = {alpha}");
    }
}

#[test]
fn oracle_gap_halves_as_n_doubles() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "nwave.json",
        r#"{
          "spec": {"kind": "separable_forced", "potential_coeffs": []},
          "grid": {"n": 256, "m": 16},
          "initial": {"kind": "fourier", "mean": 0.0, "modes": [{"k": 1, "amp_sin": 1.0}]},
          "experiment": {"n_grid": [256, 512, 1024]}
        }"#,
    );
    let out = tmp.path().join("out");
    let r = run(&["oracle-compare", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(out.join("oracle_compare.csv")).unwrap();
    let gaps: Vec<f64> =
        text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(gaps.len(), 3);
    assert!(gaps[1] <= 0.6 * gaps[0], "gaps {gaps:?}");
    assert!(gaps[2] <= 0.6 * gaps[1], "gaps {gaps:?}");
}

#[test]
fn period_report_round_trips_and_strict_tolerance_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "pend.json", PENDULUM);
    let out = tmp.path().join("out");
    let r = run(&["period", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&r.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    assert!(report["detected_t"].as_u64().unwrap() >= 1);
    assert!(report["residual"].as_f64().unwrap() <= 5e-3);
    assert!(!report["limit_snapshots"].as_array().unwrap().is_empty());

    let strict = write_config(
        tmp.path(),
        "strict.json",
        &PENDULUM.replace(r#""n_periods": 40"#, r#""n_periods": 40, "tolerance": 1e-16"#),
    );
    let out2 = tmp.path().join("strict");
    let r2 = run(&["period", "--config", &strict, "--out", out2.to_str().unwrap()]);
    assert_eq!(r2.status.code(), Some(2), "non-detection must exit 2");
    let msg = String::from_utf8_lossy(&r2.stderr).to_string();
    assert!(msg.contains("no asymptotic period"), "stderr: {msg}");
}

#[test]
fn graphs_emits_polylines_and_a_defect_table() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "pend.json",
        &PENDULUM.replace(r#""n_periods": 40"#, r#""n_periods": 4"#),
    );
    let out = tmp.path().join("out");
    let r = run(&["graphs", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&r.stderr));
    let poly = fs::read_to_string(out.join("graph_0001.csv")).unwrap();
    assert!(poly.starts_with("x,p,segment_id\n"));
    let defects = fs::read_to_string(out.join("defects.csv")).unwrap();
    assert_eq!(defects.lines().next(), Some("period,inclusion_defect"));
    assert_eq!(defects.lines().count(), 5);
}

#[test]
fn corollary_reports_the_mechanism_fields() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "pend.json", PENDULUM);
    let out = tmp.path().join("out");
    let r = run(&["corollary", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&r.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("corollary.json")).unwrap()).unwrap();
    assert_eq!(report["entries"].as_array().unwrap().len(), 3);
    assert!(report["mechanism_consistent"].is_boolean());
    assert!(report["distance_spread"].is_f64());
}

#[test]
fn config_problems_exit_one_with_a_diagnostic() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let out_s = out.to_str().unwrap();

    let r = run(&["evolve", "--config", "missing.json", "--out", out_s]);
    assert_eq!(r.status.code(), Some(1));

    let broken = write_config(tmp.path(), "broken.json", r#"{"spec": nope"#);
    let r = run(&["evolve", "--config", &broken, "--out", out_s]);
    assert_eq!(r.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&r.stderr).to_string();
    assert!(msg.contains("line"), "diagnostic should locate the error: {msg}");

    let bad_grid =
        write_config(tmp.path(), "bad_grid.json", &LAX.replace(r#""n": 128"#, r#""n": 100"#));
    let r = run(&["evolve", "--config", &bad_grid, "--out", out_s]);
    assert_eq!(r.status.code(), Some(1));

    let no_grid =
        write_config(tmp.path(), "no_c.json", ALPHA.replace("[0.0, 0.25, 0.5]", "[]").as_str());
    let r = run(&["alpha-curve", "--config", &no_grid, "--out", out_s]);
    assert_eq!(r.status.code(), Some(1));

    // Usage errors are config errors too, not the non-convergence code.
    let r = run(&["evolve"]);
    assert_eq!(r.status.code(), Some(1));
    let r = run(&["no-such-command", "--config", "x", "--out", "y"]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn seed_flag_overrides_the_config_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "random.json",
        r#"{
          "spec": {"kind": "separable_forced", "potential_coeffs": []},
          "grid": {"n": 64, "m": 16},
          "initial": {"kind": "random", "mean": 0.0, "max_mode": 3, "amp": 0.2},
          "experiment": {"n_periods": 1, "seed": 11}
        }"#,
    );
    let run_seed = |dir: &str, seed: Option<&str>| {
        let out = tmp.path().join(dir);
        let mut args = vec![
            "evolve".to_string(),
            "--config".to_string(),
            cfg.clone(),
            "--out".to_string(),
            out.to_str().unwrap().to_string(),
        ];
        if let Some(s) = seed {
            args.push("--seed".to_string());
            args.push(s.to_string());
        }
        let r = bin().args(&args).output().unwrap();
        assert_eq!(r.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&r.stderr));
        fs::read(out.join("snapshot_0000.csv")).unwrap()
    };
    let a = run_seed("a", Some("1"));
    let b = run_seed("b", Some("2"));
    let c = run_seed("c", Some("1"));
    let d = run_seed("d", None);
    assert_eq!(a, c, "same seed must reproduce bytes");
    assert_ne!(a, b, "different seeds must differ");
    assert_ne!(a, d, "flag must override the config seed");
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 1);
}
