use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_enaqt"))
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str], config: &Path) -> Output {
    bin().args(args).arg("--config").arg(config).output().unwrap()
}

fn write_config(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and rows as floats (`nan` allowed).
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(|f| f.parse::<f64>().unwrap()).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

fn max_eta(text: &str) -> f64 {
    let (h, rows) = parse_csv(text);
    let c = column(&h, "eta");
    rows.iter().map(|r| r[c]).filter(|x| x.is_finite()).fold(f64::MIN, f64::max)
}

#[test]
fn fig2a_sweep_surface() {
    let text = stdout(&run(&["sweep"], &shipped("fig2a.json")));
    let (h, rows) = parse_csv(&text);
    assert_eq!(h, ["lambda", "kappa", "eta", "tau", "rate", "missing"]);
    assert_eq!(rows.len(), 200 * 200);
    assert!((max_eta(&text) - 0.33).abs() < 0.005);
}

#[test]
fn fig3c_sweep_surface() {
    let text = stdout(&run(&["sweep"], &shipped("fig3c.json")));
    assert!((max_eta(&text) - 0.83).abs() < 0.005);
}

#[test]
fn csv_fields_are_finite_unless_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "s.json",
        r#"{"network": {"n_sites": 6, "detuning": 2.0, "trap_rate": 1.0},
            "axes": [{"param": "lambda", "min": 0.0, "max": 2.0, "count": 5}]}"#,
    );
    let text = stdout(&run(&["sweep"], &cfg));
    let (h, rows) = parse_csv(&text);
    let flag = column(&h, "missing");
    assert_eq!(rows[0][flag], 1.0);
    assert!(rows[0][2].is_nan());
    for r in &rows[1..] {
        assert_eq!(r[flag], 0.0);
        assert!(r.iter().all(|x| x.is_finite()));
    }
    for line in text.lines().skip(1) {
        for field in line.split(',') {
            assert!(field == "nan" || field.parse::<f64>().is_ok_and(f64::is_finite), "{field}");
        }
    }
}

#[test]
fn single_cell_sweep_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "one.json",
        r#"{"network": {"n_sites": 20, "detuning": 100.0, "decay_rate": 0.01, "trap_rate": 44.0},
            "axes": [{"param": "lambda", "min": 56.0, "max": 56.0, "count": 1}]}"#,
    );
    let (_, rows) = parse_csv(&stdout(&run(&["sweep"], &cfg)));
    assert_eq!(rows.len(), 1);
    assert!((rows[0][1] - 0.332).abs() < 1e-3);
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let cfg = shipped("fig4a.json");
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        let o = bin().args(["sweep", "--threads", threads, "--out"]).arg(out).arg("--config").arg(&cfg).output().unwrap();
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let first = stdout(&run(&["validate", "--seed", "9"], &shipped("validate.json")));
    let second = stdout(&run(&["validate", "--seed", "9"], &shipped("validate.json")));
    assert_eq!(first, second);
}

#[test]
fn reduced_solver_flag_agrees_with_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "r.json",
        r#"{"network": {"n_sites": 12, "detuning": 5.0, "decay_rate": 0.05},
            "s": 3,
            "axes": [{"param": "lambda", "min": 0.1, "max": 50.0, "count": 7, "spacing": "log"},
                     {"param": "kappa", "min": 0.1, "max": 50.0, "count": 6, "spacing": "log"}]}"#,
    );
    let (_, a) = parse_csv(&stdout(&run(&["sweep"], &cfg)));
    let (_, b) = parse_csv(&stdout(&run(&["sweep", "--solver", "reduced"], &cfg)));
    for (x, y) in a.iter().zip(&b) {
        for c in 2..5 {
            assert!(((x[c] - y[c]) / x[c]).abs() < 1e-9, "{x:?} vs {y:?}");
        }
    }
}

#[test]
fn bad_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(
        &dir,
        "u.json",
        r#"{"network": {"n_sites": 5}, "axes": [{"param": "kappa", "min": 1, "max": 2, "count": 2}], "colour": 1}"#,
    );
    let bad_axis = write_config(
        &dir,
        "b.json",
        r#"{"network": {"n_sites": 5}, "axes": [{"param": "kappa", "min": 2, "max": 1, "count": 2}]}"#,
    );
    let bad_s = write_config(
        &dir,
        "s.json",
        r#"{"network": {"n_sites": 5}, "s": 5, "axes": [{"param": "kappa", "min": 1, "max": 2, "count": 2}]}"#,
    );
    let both = write_config(
        &dir,
        "d.json",
        r#"{"network": {"n_sites": 5, "detuning": 1, "trap_energy": 4}, "axes": [{"param": "kappa", "min": 1, "max": 2, "count": 2}]}"#,
    );
    let not_json = write_config(&dir, "n.json", "{");
    for cfg in [&unknown, &bad_axis, &bad_s, &both, &not_json] {
        assert_eq!(run(&["sweep"], cfg).status.code(), Some(2), "{}", cfg.display());
    }
    assert_eq!(bin().arg("sweep").output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["sweep", "--config", "/nonexistent.json"]).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["sweep", "--solver", "magic"]).output().unwrap().status.code(), Some(2));
}

fn optimum(config: &str) -> Value {
    let v: Value = serde_json::from_str(&stdout(&run(&["optimize"], &shipped(config)))).unwrap();
    v["optimum"].clone()
}

#[test]
fn optimize_fig2a() {
    let o = optimum("optimize_fig2a.json");
    assert!((o["value"].as_f64().unwrap() - 0.33).abs() < 0.005);
    assert!((o["lambda"].as_f64().unwrap() - 56.0).abs() < 2.0);
    assert!((o["kappa"].as_f64().unwrap() - 44.0).abs() < 2.0);
    assert_eq!(o["boundary_flag"], false);
}

#[test]
fn optimize_fully_coherent_superposition_sits_on_boundary() {
    let o = optimum("optimize_fig4c.json");
    assert_eq!(o["boundary_flag"], true);
    assert_eq!(o["lambda"].as_f64().unwrap(), 0.0);
    assert!((o["value"].as_f64().unwrap() - 0.9).abs() < 0.01);
}

#[test]
fn optimize_lossless_rate_matches_analytic() {
    let v: Value = serde_json::from_str(&stdout(&run(&["optimize"], &shipped("optimize_rate_lossless.json")))).unwrap();
    for report in [&v["optimum"]["analytic"], &v["verify"]["comparison"]] {
        for key in ["kappa_rel_delta", "lambda_rel_delta", "rate_rel_delta"] {
            assert!(report[key].as_f64().unwrap() < 1e-6, "{key}: {}", report[key]);
        }
    }
}

#[test]
fn validate_passes_for_default_and_override_seeds() {
    let o = bin().arg("validate").output().unwrap();
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["suites"].as_array().unwrap().iter().any(|s| s["name"] == "no_absorption_is_rejected"));
    for seed in ["1", "424242"] {
        let o = bin().args(["validate", "--seed", seed]).output().unwrap();
        assert_eq!(o.status.code(), Some(0));
        let v: Value = serde_json::from_str(&String::from_utf8(o.stdout).unwrap()).unwrap();
        assert_eq!(v["seed"].as_u64().unwrap().to_string(), seed);
    }
}

#[test]
fn trajectory_columns_and_conservation() {
    let text = stdout(&run(&["trajectory"], &shipped("trajectory.json")));
    let (h, rows) = parse_csv(&text);
    assert_eq!(
        h,
        ["t", "rho_nn", "x", "y", "sigma", "trace", "eta_accumulated", "decay_accumulated", "rho_nn_full"]
    );
    assert_eq!(rows[0], vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
    let (rho, trace, eta, decay, full) = (
        column(&h, "rho_nn"),
        column(&h, "trace"),
        column(&h, "eta_accumulated"),
        column(&h, "decay_accumulated"),
        column(&h, "rho_nn_full"),
    );
    for r in &rows {
        assert!((r[eta] + r[decay] + r[trace] - 1.0).abs() < 1e-9);
        assert!((r[rho] - r[full]).abs() < 1e-9);
    }
}

#[test]
fn trajectory_from_density_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "t.json",
        r#"{"network": {"n_sites": 3, "detuning": 1.0, "trap_rate": 1.0, "decay_rate": 0.1, "dephasing_rate": 0.5},
            "initial": {"density_matrix": {"re": [[0.5, 0.1, 0.0], [0.1, 0.3, 0.0], [0.0, 0.0, 0.2]],
                                           "im": [[0.0, 0.05, 0.0], [-0.05, 0.0, 0.0], [0.0, 0.0, 0.0]]}},
            "times": [0.0, 0.5, 2.0],
            "full": true}"#,
    );
    let (h, rows) = parse_csv(&stdout(&run(&["trajectory"], &cfg)));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][column(&h, "rho_nn")], 0.2);
    assert_eq!(rows[0][column(&h, "sigma")], 1.2);
    for r in &rows {
        assert!((r[1] - r[8]).abs() < 1e-9);
    }
}

#[test]
fn trajectory_beyond_dimension_cap_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "big.json",
        r#"{"network": {"n_sites": 41, "trap_rate": 1.0}, "initial": {"superposition": 1},
            "times": [0.0, 1.0], "full": true}"#,
    );
    assert_eq!(run(&["trajectory"], &cfg).status.code(), Some(3));
}

#[test]
fn limits_report() {
    let v: Value = serde_json::from_str(&stdout(&run(&["limits"], &shipped("limits.json")))).unwrap();
    assert!((v["efficiency"].as_f64().unwrap() - 0.332).abs() < 1e-3);
    assert!((v["efficiency_coherent_limit"].as_f64().unwrap() - 1.0 / 19.0).abs() < 1e-15);
    assert!((v["enaqt_optimum"]["c_ratio"].as_f64().unwrap() - 1.8_f64.sqrt()).abs() < 1e-12);
    assert!(v["alpha_two_site"]["error"].is_string());
    assert!(v["coherent_rate"]["rate_max"].is_number());
}
