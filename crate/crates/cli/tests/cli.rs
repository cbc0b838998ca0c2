use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn thermovqa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermovqa")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&thermovqa(&["prepare", "--n", "2", "--beta", "1"])), 2);
    assert_eq!(code(&thermovqa(&["resources", "--n", "x"])), 2);
    assert_eq!(code(&thermovqa(&["prepare", "--n", "2", "--beta=-1", "--seed", "1"])), 2);
    assert_eq!(code(&thermovqa(&["shots", "--n-min", "6", "--n-max", "7"])), 2);
    assert_eq!(code(&thermovqa(&["bogus"])), 2);
}

#[test]
fn help_exits_0() {
    let out = thermovqa(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("prepare"));
}

#[test]
fn input_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = thermovqa(&["tfd", "--params", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("input error"));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, b"{\"config\": 1}").unwrap();
    assert_eq!(code(&thermovqa(&["tfd", "--params", garbage.to_str().unwrap()])), 3);
}

#[test]
fn capacity_errors_exit_4() {
    assert_eq!(code(&thermovqa(&["prepare", "--n", "20", "--beta", "1", "--seed", "1", "--runs", "1"])), 4);
    assert_eq!(code(&thermovqa(&["shots", "--n-min", "15", "--n-max", "17", "--k", "1", "--gamma", "0.5", "--beta", "1"])), 4);
}

#[test]
fn resources_text_table() {
    let out = thermovqa(&["resources", "--n", "4"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n = 4, l_A = 3, l_S = 3"));
    for row in ["parameters", "cnot_gates", "sqrt_x_gates", "circuit_depth"] {
        let line = text.lines().find(|l| l.starts_with(row)).unwrap();
        let cols: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(cols[1], cols[2], "{line}");
    }
    assert!(!text.contains("note:"));

    let small = String::from_utf8(thermovqa(&["resources", "--n", "2"]).stdout).unwrap();
    assert!(small.contains("note: formulas inapplicable (n > 2 required)"));
}

#[test]
fn resources_json() {
    let out = thermovqa(&["resources", "--n", "3", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "resources");
    assert_eq!(v["result"]["agree"], true);
    assert_eq!(v["result"]["circuit"], v["result"]["formulas"]);
}

#[test]
fn prepare_then_tfd_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let prep = dir.path().join("prep.json");
    let traces = dir.path().join("traces");
    let out = thermovqa(&[
        "prepare", "--n", "3", "--beta", "1", "--seed", "5", "--runs", "3",
        "--trace", traces.to_str().unwrap(), "--output", prep.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let p = read_json(&prep);
    assert_eq!(p["command"], "prepare");
    assert_eq!(p["result"]["runs"].as_array().unwrap().len(), 3);
    let best = &p["result"]["best"];
    let f = best["free_energy"].as_f64().unwrap();
    let exact = p["result"]["exact"]["free_energy"].as_f64().unwrap();
    assert!(f >= exact - 1e-9);
    let probs: f64 = best["ancilla_probabilities"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
    assert!((probs - 1.0).abs() < 1e-12);
    assert_eq!(std::fs::read_dir(&traces).unwrap().count(), 3);

    let tfd = dir.path().join("tfd.json");
    let out = thermovqa(&["tfd", "--params", prep.to_str().unwrap(), "--output", tfd.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = &read_json(&tfd)["result"];
    let resim = r["resimulated_free_energy"].as_f64().unwrap();
    assert!((resim - f).abs() < 1e-10);
    assert!(r["mutual_trace_distance"].as_f64().unwrap() < 1e-10);
    assert!((r["fidelity_a"].as_f64().unwrap() - r["fidelity_b"].as_f64().unwrap()).abs() < 1e-10);
}

#[test]
fn sweep_csv_shape() {
    let out = thermovqa(&["sweep", "--n", "2", "--beta", "0.5,2", "--gamma", "0.5", "--runs", "2", "--seed", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,beta,gamma,h,best_fidelity,best_free_energy,exact_free_energy,iterations");
    assert_eq!(lines.len(), 3);
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 8);
        assert!(line.starts_with("2,"));
    }
}

#[test]
fn shots_flags_infinite_temperature() {
    let out = thermovqa(&["shots", "--gamma", "0.5", "--beta", "0,2", "--n-min", "4", "--n-max", "6", "--k", "2"]);
    assert_eq!(code(&out), 0);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.lines().any(|l| l.contains("beta=0") && l.starts_with("warning")));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "gamma,beta,i,alpha_i,C,r_squared,n_min,n_max");
    assert_eq!(text.lines().count(), 1 + 2 * 2);
}

#[test]
fn jobs_flag_does_not_change_results() {
    let run = |jobs: &str| {
        let out = thermovqa(&["--jobs", jobs, "sweep", "--n", "2", "--beta", "1", "--gamma", "0.3,0.7", "--runs", "3", "--seed", "9"]);
        assert_eq!(code(&out), 0);
        out.stdout
    };
    assert_eq!(run("1"), run("4"));
}
