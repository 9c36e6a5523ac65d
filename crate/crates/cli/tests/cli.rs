// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mtkink_core::units::{load_preset, PRESET_NAMES};
use mtkink_core::{critical_sigma, PhysicalParams};
use serde_json::Value;

fn mtkink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtkink"))
        .args(args)
        .env_remove("MTKINK_PRESET_DIR")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = mtkink(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn f(v: &Value, key: &str) -> f64 {
    v[key]
        .as_f64()
        .unwrap_or_else(|| panic!("{key} missing in {v}"))
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn repo_presets() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets")
}

#[test]
fn kink_paper_preset_summary() {
    let v = json(&["kink", "--preset", "paper"]);
    assert!((f(&v, "v_paper") - 2.0).abs() < 0.1);
    assert!((f(&v, "t_T_for_1um") / 5e-7 - 1.0).abs() < 0.05);
    assert!((f(&v, "Delta_eV") - 1.0).abs() < 0.05);
}

#[test]
fn kink_symmetric_sigma() {
    let v = json(&["kink", "--sigma", "0"]);
    assert_eq!(v["roots"]["a"], -1.0);
    assert_eq!(v["roots"]["d"], 0.0);
    assert_eq!(v["roots"]["b"], 1.0);
    assert_eq!(f(&v, "rho_consistent"), 0.0);
    assert!(v["v_paper"].is_null());
}

#[test]
fn kink_regime_lost_exits_3() {
    let out = mtkink(&["kink", "--sigma", "0.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kink regime lost"));
}

#[test]
fn kink_profile_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    json(&[
        "kink",
        "--sigma",
        "-0.2",
        "--points",
        "81",
        "--profile-out",
        path.to_str().unwrap(),
    ]);
    let (header, rows) = csv_rows(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(header, ["xi", "psi", "dpsi_dxi", "residual"]);
    assert_eq!(rows.len(), 81);
    for r in &rows {
        let res: f64 = r[3].parse().unwrap();
        assert!(res.abs() < 1e-10);
    }
}

#[test]
fn simulate_paper_preset_matches_prediction() {
    let v = json(&["simulate", "--preset", "paper"]);
    assert!(f(&v, "relative_error") < 0.02);
}

#[test]
fn simulate_frictionless_conserves_energy() {
    let v = json(&[
        "simulate", "--gamma", "0", "--efield", "0", "--t-end", "2e-11",
    ]);
    assert!(f(&v, "energy_drift") < 1e-3);
}

#[test]
fn simulate_zero_length_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let v = json(&[
        "simulate",
        "--t-end",
        "0",
        "--trajectory-out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(v["samples"], 1);
    assert!(v["v_measured"].is_null());
    let (header, rows) = csv_rows(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(header, ["t", "front_x", "energy"]);
    assert_eq!(rows.len(), 1);
}

#[test]
fn simulate_oversized_step_is_numerical_failure() {
    let out = mtkink(&["simulate", "--dt", "1e-13", "--t-end", "1e-12"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(!out.stderr.is_empty());
}

#[test]
fn stringmap_boundary() {
    let v = json(&["stringmap", "--rho", "2"]);
    assert_eq!(f(&v, "c_x"), 25.0);
    assert_eq!(f(&v, "v_s_squared"), 0.0);
    assert!(v.get("c_s").is_none());
}

#[test]
fn stringmap_paper_preset() {
    let v = json(&["stringmap", "--preset", "paper"]);
    let c_s = f(&v, "c_s");
    assert!(c_s > 1.0 && c_s < 25.0);
    assert_eq!(v["reality"]["printed"], false);
    assert_eq!(v["reality"]["agree"], true);
}

#[test]
fn stringmap_adm_mass() {
    let v = json(&["stringmap", "--adm", "--k", "3", "--a", "0"]);
    assert_eq!(f(&v, "mass"), 1.0);
    assert_eq!(
        mtkink(&["stringmap", "--adm", "--k", "2"]).status.code(),
        Some(2)
    );
}

#[test]
fn collapse_estimates() {
    let v = json(&[
        "collapse",
        "--mgus-gev",
        "1e18",
        "--e-ev",
        "1",
        "--t-sec",
        "1",
    ]);
    assert!((f(&v, "N") / 6.6e11 - 1.0).abs() < 0.01);
    let back = json(&[
        "collapse",
        "--mgus-gev",
        "1e18",
        "--e-ev",
        "1",
        "--n",
        &f(&v, "N").to_string(),
    ]);
    assert!((f(&back, "t_col_s") - 1.0).abs() < 1e-12);
    let b = json(&["collapse", "--bound", "--L", "1e-6", "--Ls", "1e-35"]);
    assert!((f(&b, "delta_L_m") / 3.16e-21 - 1.0).abs() < 0.001);
}

#[test]
fn collapse_trace_half_life() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let v = json(&[
        "collapse",
        "--trace",
        "--dim",
        "2",
        "--lambda",
        "37",
        "--trace-out",
        path.to_str().unwrap(),
    ]);
    assert!(f(&v, "relative_error") < 0.01);
    let (header, rows) = csv_rows(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(header, ["t", "abs_rho_0_1", "purity"]);
    assert_eq!(rows.len(), v["steps"].as_u64().unwrap() as usize + 1);
}

fn sweep(args: &[&str]) -> Vec<Vec<String>> {
    let mut full = vec!["sweep"];
    full.extend_from_slice(args);
    let out = mtkink(&full);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header[0], "value");
    assert_eq!(header.len(), 12);
    rows
}

#[test]
fn sweep_field_speeds_up_kink() {
    let rows = sweep(&[
        "--var", "E_field", "--from", "1e5", "--to", "1e7", "--points", "9", "--log",
    ]);
    assert_eq!(rows.len(), 9);
    let v: Vec<f64> = rows.iter().map(|r| r[6].parse().unwrap()).collect();
    assert!(rows.iter().all(|r| r[2] == "ok"));
    assert!(v.windows(2).all(|w| w[1] > w[0]));
    assert!(v[8] / v[0] > 50.0);
}

#[test]
fn sweep_constant_rows() {
    let rows = sweep(&[
        "--var", "E_field", "--from", "0", "--to", "0", "--points", "5",
    ]);
    assert!(rows.iter().all(|r| r == &rows[0]));
    assert_eq!(rows[0][2], "no-propagation");
}

#[test]
fn sweep_flags_regime_loss_at_critical_field() {
    let p = load_preset("paper").unwrap();
    let e_c = critical_sigma() * p.a.powf(1.5) / (p.q * p.b.sqrt());
    let rows = sweep(&[
        "--var",
        "E_field",
        "--from",
        &(0.5 * e_c).to_string(),
        "--to",
        &(1.5 * e_c).to_string(),
        "--points",
        "101",
    ]);
    let first_lost = rows.iter().position(|r| r[2] == "regime-lost").unwrap();
    assert!(rows[..first_lost].iter().all(|r| r[2] == "ok"));
    assert!(rows[first_lost..].iter().all(|r| r[2] == "regime-lost"));
    let below: f64 = rows[first_lost - 1][0].parse().unwrap();
    let above: f64 = rows[first_lost][0].parse().unwrap();
    assert!(below < e_c && e_c <= above, "{below} {e_c} {above}");
}

#[test]
fn sweep_temperature_past_critical_is_flagged() {
    let rows = sweep(&[
        "--var", "T", "--from", "290", "--to", "310", "--points", "5",
    ]);
    assert_eq!(rows[4][2], "not-double-well");
    assert!(rows[0][2] == "ok" || rows[0][2] == "regime-lost");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "preset = paper\nE_field = 0\nsigma = 0.1\n").unwrap();
    let from_file = json(&["kink", "--config", conf.to_str().unwrap()]);
    assert_eq!(f(&from_file, "sigma"), 0.1);
    let flag = json(&["kink", "--config", conf.to_str().unwrap(), "--sigma", "0.2"]);
    assert_eq!(f(&flag, "sigma"), 0.2);

    let jconf = dir.path().join("run.json");
    std::fs::write(&jconf, r#"{"preset": "paper", "gamma": 0}"#).unwrap();
    let frictionless = json(&["kink", "--config", jconf.to_str().unwrap()]);
    assert_eq!(frictionless["v_paper"], frictionless["v0"]);
    let set = json(&[
        "kink",
        "--config",
        jconf.to_str().unwrap(),
        "--set",
        "gamma=3.52164e-7",
    ]);
    assert!((f(&set, "v_paper") - 2.0).abs() < 0.1);
}

#[test]
fn preset_dir_discovery() {
    let dir = tempfile::tempdir().unwrap();
    let custom = load_preset("paper").unwrap().with_e_field(2.0 * 4.73284e6);
    std::fs::write(dir.path().join("double.conf"), custom.to_key_value()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mtkink"))
        .args(["kink", "--preset", "double"])
        .env("MTKINK_PRESET_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(f(&v, "sigma"), custom.derive().unwrap().sigma);
    assert_eq!(
        mtkink(&["kink", "--preset", "double"]).status.code(),
        Some(2)
    );
}

#[test]
fn validation_errors_exit_2() {
    assert_eq!(mtkink(&["kink", "--set", "A=-1"]).status.code(), Some(2));
    assert_eq!(mtkink(&["kink", "--set", "bogus=1"]).status.code(), Some(2));
    assert_eq!(
        mtkink(&["simulate", "--n-grid", "4"]).status.code(),
        Some(2)
    );
    assert_eq!(mtkink(&["collapse", "--e-ev", "1"]).status.code(), Some(2));
    assert_eq!(mtkink(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn committed_presets_match_builtins() {
    for name in PRESET_NAMES {
        let path = repo_presets().join(format!("{name}.conf"));
        let parsed = PhysicalParams::from_file(&path).unwrap();
        assert_eq!(parsed, load_preset(name).unwrap(), "{name}");
    }
}
