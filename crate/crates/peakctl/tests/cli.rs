use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const EXAMPLE1_PEAK: f64 = 2.431_945_622_001_443;

fn peakctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_peakctl")).args(args).output().expect("spawn peakctl")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn report(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).expect("json on stdout");
    v["report"].clone()
}

fn without_timestamp(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).lines().filter(|l| !l.contains("generated_at")).collect::<Vec<_>>().join("\n")
}

fn data_rows(text: &str) -> Vec<csv::StringRecord> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(body.as_bytes()).records().map(|r| r.unwrap()).collect()
}

#[test]
fn synthesize_matches_the_closed_form() {
    let out = peakctl(&["synthesize", "--model", "example1", "--budget", "0.1"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert!((r["y0max"].as_f64().unwrap() - EXAMPLE1_PEAK).abs() < 1e-9);
    assert!((r["ystar"].as_f64().unwrap() - EXAMPLE1_PEAK / 1.1).abs() < 1e-8);
    assert_eq!(r["regime"], "interior");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&peakctl(&["synthesize", "--model", "nope"])), 1);
    assert_eq!(code(&peakctl(&["synthesize", "--bogus-flag"])), 1);
    assert_eq!(code(&peakctl(&["synthesize", "--params", "Km=oops"])), 1);
    assert_eq!(code(&peakctl(&["sweep", "--axis", "budget", "--values", ""])), 1);
    assert_eq!(code(&peakctl(&["check", "--model", "monod", "--params", "m=1.2", "--grid", "30"])), 2);
    assert_eq!(code(&peakctl(&["check", "--model", "sir", "--grid", "40"])), 0);
    assert_eq!(code(&peakctl(&["--help"])), 0);
}

#[test]
fn runs_are_reproducible() {
    let args = ["oracle", "--model", "sir", "--budget", "0.5", "--samples", "60", "--seed", "9"];
    let (a, b) = (peakctl(&args), peakctl(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(without_timestamp(&a.stdout), without_timestamp(&b.stdout));
}

#[test]
fn sweep_follows_the_closed_form() {
    let out = peakctl(&["sweep", "--model", "example1", "--axis", "budget", "--values", "0,0.05,0.1,0.2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# config: "));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 4);
    for row in rows {
        let k: f64 = row[1].parse().unwrap();
        let ystar: f64 = row[2].parse().unwrap();
        assert!((ystar - EXAMPLE1_PEAK / (1.0 + k)).abs() < 1e-8, "K = {k}: {ystar}");
    }
}

#[test]
fn config_file_values_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"schema": "peakctl-config/1", "model": "example1", "budget": 0.2}"#).unwrap();
    let p = path.to_str().unwrap();

    let from_file = report(&peakctl(&["synthesize", "--config", p]));
    assert!((from_file["ystar"].as_f64().unwrap() - EXAMPLE1_PEAK / 1.2).abs() < 1e-8);

    let overridden = report(&peakctl(&["synthesize", "--config", p, "--budget", "0.1"]));
    assert!((overridden["ystar"].as_f64().unwrap() - EXAMPLE1_PEAK / 1.1).abs() < 1e-8);

    std::fs::write(&path, r#"{"schema": "other/9"}"#).unwrap();
    assert_eq!(code(&peakctl(&["synthesize", "--config", p])), 1);
}

#[test]
fn uncontrolled_simulation_reaches_the_free_peak() {
    let out = peakctl(&["simulate", "--model", "example1", "--uncontrolled"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["mode"], "uncontrolled");
    assert!((r["peak"].as_f64().unwrap() - EXAMPLE1_PEAK).abs() < 1e-8);
    assert_eq!(r["spent"].as_f64().unwrap(), 0.0);
}

#[test]
fn artifacts_land_in_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let o = out_dir.to_str().unwrap();
    assert_eq!(code(&peakctl(&["synthesize", "--model", "sir", "--budget", "0.5", "--out", o])), 0);
    assert_eq!(code(&peakctl(&["simulate", "--model", "sir", "--budget", "0.5", "--out", o])), 0);
    for name in ["synthesis.json", "budget_curve.csv", "simulation.json", "trajectory.csv"] {
        assert!(Path::new(o).join(name).is_file(), "{name} missing");
    }
    let traj = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    let rows = data_rows(&traj);
    let peak = rows.iter().map(|r| r[2].parse::<f64>().unwrap()).fold(f64::MIN, f64::max);
    let sim: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("simulation.json")).unwrap()).unwrap();
    assert!((peak - sim["report"]["ystar"].as_f64().unwrap()).abs() < 1e-6);
    assert!(rows.iter().any(|r| &r[5] == "singular"));
}
