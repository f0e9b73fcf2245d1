use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nlqm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlqm")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).expect("valid JSON")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

const BELL_POWER_GAP: &str = r#"{
  "command": "gap",
  "scenario": {"kind": "bell", "observable": {"kind": "power", "P": [[[1,0],[0,0]],[[0,0],[0,0]]], "k": 2}},
  "expect_no_signal": true
}"#;

#[test]
fn gap_on_bell_power_is_a_quarter_and_flags_the_signal() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "gap.json", BELL_POWER_GAP);
    let out = nlqm(&["--config", &cfg]);
    assert_eq!(code(&out), 2);
    let report = json(&out.stdout);
    assert!((report["gap"]["gap"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(report["config"]["seed"], 0);
}

#[test]
fn certify_quadratic_exits_zero() {
    let out = nlqm(&["--example", "d3-gleason-pass"]);
    assert_eq!(code(&out), 0);
    let report = json(&out.stdout);
    assert_eq!(report["certificate"]["verdict"], "quadratic-consistent");

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "certify.json",
        r#"{"command": "certify", "observable": {"kind": "quadratic", "F": [[[0.5,0],[0,0]],[[0,0],[0.25,0]]]}, "expect_no_signal": true}"#,
    );
    let out = nlqm(&["--config", &cfg, "--samples", "200"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out.stdout)["certificate"]["method"], "affinity");
}

#[test]
fn simulate_is_reproducible_and_seed_sensitive() {
    let a = nlqm(&["--example", "bell-power", "--samples", "5000", "--seed", "3"]);
    let b = nlqm(&["--example", "bell-power", "--samples", "5000", "--seed", "3", "--workers", "3"]);
    let c = nlqm(&["--example", "bell-power", "--samples", "5000", "--seed", "4"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(json(&a.stdout)["config"]["seed"], 3);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&nlqm(&[])), 1);
    assert_eq!(code(&nlqm(&["--example", "nope"])), 1);
    assert_eq!(code(&nlqm(&["--example", "bell-power", "--format", "xml"])), 1);
    assert_eq!(code(&nlqm(&["--example", "bell-power", "--workers", "0"])), 1);
    assert_eq!(code(&nlqm(&["--example", "bell-power", "--tolerance", "-1"])), 1);
    assert_eq!(code(&nlqm(&["--help"])), 0);
}

#[test]
fn malformed_config_reports_the_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"command": "simulate", "scenario": {"kind": "bell", "observable": {"kind": "constant", "dim": 2, "value": 1}}, "samples": "many"}"#,
    );
    let out = nlqm(&["--config", &cfg]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("`samples`"), "{err}");

    let cfg = write_config(
        dir.path(),
        "dims.json",
        r#"{"command": "affinity", "observable": {"kind": "constant", "dim": 3, "value": 1}}"#,
    );
    assert_eq!(code(&nlqm(&["--config", &cfg])), 1);
}

#[test]
fn out_file_csv_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.csv");
    let plot = dir.path().join("conv.csv");
    let samples = dir.path().join("samples.csv");
    let out = nlqm(&[
        "--example",
        "bell-power",
        "--samples",
        "1000",
        "--format",
        "csv",
        "--out",
        report.to_str().unwrap(),
        "--plot",
        "convergence",
        "--plot-out",
        plot.to_str().unwrap(),
        "--dump-samples",
        samples.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let csv = fs::read_to_string(&report).unwrap();
    assert!(csv.starts_with("field,value\ncommand,simulate\n"), "{csv}");
    assert!(csv.contains("\ngap,0.25"), "{csv}");
    let conv = fs::read_to_string(&plot).unwrap();
    assert_eq!(conv.lines().next(), Some("n,mc_gap,stderr"));
    assert_eq!(conv.lines().count(), 4);
    let dumped = fs::read_to_string(&samples).unwrap();
    assert_eq!(dumped.lines().count(), 1 + 2 * 1000);
    // Letter 1 of the bell-power scenario always yields 1/4.
    for line in dumped.lines().filter(|l| l.starts_with("1,")) {
        let v: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((v - 0.25).abs() < 1e-12, "{line}");
    }
}

#[test]
fn plot_to_stdout_needs_report_elsewhere() {
    assert_eq!(code(&nlqm(&["--example", "d3-gleason-fail", "--plot", "violation-histogram"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = nlqm(&[
        "--example",
        "d3-gleason-fail",
        "--plot",
        "violation-histogram",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("bin_lo,bin_hi,count\n"));
    assert_eq!(json(&fs::read(&report).unwrap())["certificate"]["verdict"], "non-quadratic");
    // Plot kind must match the report.
    let out = nlqm(&["--example", "d3-gleason-fail", "--plot", "bloch", "--out", report.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn printed_configs_reparse_to_the_same_normal_form() {
    let list = nlqm(&["--list-examples"]);
    let names = String::from_utf8(list.stdout).unwrap();
    assert_eq!(names.lines().count(), 4);
    let dir = tempfile::tempdir().unwrap();
    for name in names.lines() {
        let printed = nlqm(&["--example", name, "--print-config"]);
        assert_eq!(code(&printed), 0);
        let path = write_config(dir.path(), "c.json", std::str::from_utf8(&printed.stdout).unwrap());
        let again = nlqm(&["--config", &path, "--print-config"]);
        assert_eq!(printed.stdout, again.stdout, "{name}");
    }
}
