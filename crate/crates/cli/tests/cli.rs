use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn radflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn config(name: &str) -> String {
    configs().join(name).display().to_string()
}

#[test]
fn case_8_verifies_its_commutators() {
    let out = radflow(&["verify-symmetries", "--case", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema"], "radflow.report.v1");
    assert_eq!(r["seed"], 20_240_611);
    assert_eq!(r["pass"], true);
    let case = &r["result"]["cases"][0];
    assert!(case["algebra"].as_str().unwrap().starts_with("sl(2,R)"));
    let commutators = case["commutators"].as_array().unwrap();
    assert!(!commutators.is_empty());
    assert!(commutators.iter().all(|c| c["ok"] == true));
    for row in r["result"]["generators"].as_array().unwrap() {
        assert_eq!(row["residual_zero"], true);
        assert_eq!(row["commutators_ok"], true);
    }
}

#[test]
fn unknown_case_is_a_config_error() {
    let out = radflow(&["verify-symmetries", "--case", "99"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown case"));
    assert!(out.stdout.is_empty());
}

#[test]
fn case_generators_fail_for_another_eos() {
    let eos = config("eos_polytropic_q1.toml");
    let out = radflow(&["verify-symmetries", "--case", "8", "--eos", &eos]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let rows = r["result"]["generators"].as_array().unwrap();
    let xv = rows.iter().find(|g| g["generator"] == "Xv").unwrap();
    assert_eq!(xv["residual_zero"], false);
    let x1 = rows.iter().find(|g| g["generator"] == "X1").unwrap();
    assert_eq!(x1["residual_zero"], true);
}

#[test]
fn casimir_hierarchy_to_order_two() {
    let out = radflow(&["casimir-check", "--order", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["orders"].as_array().unwrap().len(), 3);
    assert!(r["tolerances"]["node_budget"].as_f64().is_some());
}

#[test]
fn casimir_check_with_concrete_f() {
    let out = radflow(&["casimir-check", "--order", "1", "--f", "J0*J1^2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["nontrivial"], true);
}

#[test]
fn energy_density_gives_a_nontrivial_symmetry() {
    let out = radflow(&[
        "ham-symmetry",
        "--density",
        &config("energy_density.txt"),
        "--eos",
        &config("eos_polytropic_critical.toml"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["symmetry"], true);
    assert_eq!(r["result"]["casimir"], false);
    assert_eq!(r["result"]["characteristic"][2], "-U*diff(S,r)");
}

#[test]
fn simulate_writes_snapshots_report_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = radflow(&[
        "simulate",
        "--config",
        &config("polytropic_pulse.toml"),
        "--out",
        out_dir.to_str().unwrap(),
        "--cells",
        "64",
        "--snapshots",
        "3",
        "--emit-plot-data",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let last = std::fs::read_to_string(out_dir.join("snapshot_002.dat")).unwrap();
    let mut lines = last.lines();
    assert_eq!(lines.next(), Some("# n = 3, t = 0.250000000000"));
    assert_eq!(lines.next(), Some("# r U rho S"));
    assert_eq!(lines.count(), 64);
    let plot = std::fs::read_to_string(out_dir.join("plot.csv")).unwrap();
    assert_eq!(plot.lines().next(), Some("t,r,U,rho,S"));
    assert_eq!(plot.lines().count(), 1 + 3 * 64);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(saved, report(&out));
    assert!(saved["result"]["max_mass_defect"].as_f64().unwrap() <= 1e-12);
    assert_eq!(saved["tolerances"]["mass_defect"], 1e-12);
}

#[test]
fn conserve_report_orders() {
    let out = radflow(&[
        "conserve-report",
        "--config",
        &config("polytropic_pulse.toml"),
        "--cells",
        "64",
        "--balances",
        "mass,energy",
        "--min-order",
        "1.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["cells"], serde_json::json!([64, 128, 256]));
    assert_eq!(r["result"]["balances"].as_array().unwrap().len(), 2);
}

#[test]
fn advected_check_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("drift.csv");
    let out = radflow(&[
        "advected-check",
        "--branch",
        "J1",
        "--order",
        "1",
        "--flow",
        &config("entropic_ramp.toml"),
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut rd = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(rd.headers().unwrap(), vec!["r0", "initial", "relative_drift"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(report(&out)["tolerances"]["max_drift"], 1e-3);
}

#[test]
fn advected_check_rejects_inapplicable_scalars() {
    let poly = config("polytropic_pulse.toml");
    let out = radflow(&["advected-check", "--branch", "J2", "--order", "1", "--flow", &poly]);
    assert_eq!(out.status.code(), Some(2));
    let ent = config("entropic_ramp.toml");
    let out = radflow(&["advected-check", "--branch", "J1", "--order", "2", "--flow", &ent]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn time_translation_preserves_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("shifted.dat");
    let out = radflow(&[
        "transform-solution",
        "--config",
        &config("polytropic_pulse.toml"),
        "--group",
        "X1",
        "--eps",
        "0.05",
        "--out",
        profile.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let ratio = report(&out)["result"]["residuals"]["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 1e-9);
    assert!(std::fs::read_to_string(profile).unwrap().starts_with("# n = 3, t = 0.125"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "n = 3\nbogus = 1\n").unwrap();
    let out = radflow(&["simulate", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = radflow(&["simulate", "--config", "/nonexistent.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let out = radflow(&["transform-solution", "--config", &config("polytropic_pulse.toml"), "--group", "X99", "--eps", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = radflow(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn residual_ratio_above_bound_is_a_check_failure() {
    let out = radflow(&[
        "transform-solution",
        "--config",
        &config("polytropic_pulse.toml"),
        "--group",
        "Xv",
        "--eps",
        "0.05",
        "--max-ratio",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["pass"], false);
}

#[test]
fn reference_page_is_current() {
    let out = radflow(&["reference"]);
    assert_eq!(out.status.code(), Some(0));
    let page = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/cli-reference.md");
    let saved = std::fs::read_to_string(page).unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout), saved, "regenerate with `radflow reference`");
}
