use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mobgossip")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {out}"))
        .parse()
        .unwrap()
}

#[test]
fn spectrum_writes_matrix_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spectrum", "--topology", "cycle:6", "--mobility", "full", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    let (l2, t) = (value(&out, "lambda2"), value(&out, "t_relax"));
    assert!((t * (1.0 - l2) - 1.0).abs() < 1e-9);
    let csv = fs::read_to_string(dir.path().join("w.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.lines().all(|l| l.split(',').count() == 6));
    let coo = fs::read_to_string(dir.path().join("w.coo")).unwrap();
    assert!(coo.starts_with("# rows=6 cols=6"));
    let row0: f64 = coo
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().collect::<Vec<_>>())
        .filter(|f| f[0] == "0")
        .map(|f| f[2].parse::<f64>().unwrap())
        .sum();
    assert!((row0 - 1.0).abs() < 1e-12);
}

#[test]
fn simulate_writes_traces() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&["simulate", "--topology", "torus:4", "--mobility", "full", "--trials", "5", "--ticks", "300", "--out", d]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().next(), Some("tick,relative_l2_error"));
    assert_eq!(trace.lines().count(), 302);
    let agg = fs::read_to_string(dir.path().join("aggregate.csv")).unwrap();
    assert!(agg.starts_with("tick,q10_relative_l2_error,median_relative_l2_error"));
    assert!(value(&stdout(&o), "t_ave_ticks") > 0.0);
}

#[test]
fn flow_bound_certifies_and_writes_edges() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("edges.csv");
    let o = run(&[
        "flow-bound", "--topology", "cycle:8", "--mobility", "plus-mobile:1", "--flow", "hub",
        "--out", p.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("method=flow-upper"));
    assert!(value(&out, "value") >= value(&out, "t_relax"));
    let edges = fs::read_to_string(p).unwrap();
    assert_eq!(edges.lines().next(), Some("from,to,load,capacity,load_over_capacity"));
}

#[test]
fn lower_bounds_report() {
    let o = run(&["lower-bound", "--topology", "torus:6", "--mobility", "horizontal", "--partition", "rows"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("method=merge-lower"));
    let o = run(&["lower-bound", "--topology", "torus:8", "--mobility", "plus-mobile:2", "--method", "rayleigh"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("method=rayleigh-lower"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["experiment", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--mobility", "sideways"]).status.code(), Some(2));
    assert_eq!(run(&["lower-bound", "--partition", "diagonal"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn unsupported_flow_is_an_error_not_a_certificate() {
    let o = run(&["flow-bound", "--topology", "torus:4", "--mobility", "static", "--flow", "hub"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn experiment_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("spec.toml");
    fs::write(&cfg, "experiment = \"add-mobile\"\nsizes = [4]\nparams = [0, 2]\ntrials = 4\nticks = 500\n").unwrap();
    let o = run(&[
        "experiment", "add-mobile", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("final_log_error_m0="));
    assert!(out.contains("final_log_error_m2="));
    assert!(dir.path().join("add-mobile").join("summary.csv").exists());
}

#[test]
fn fit_reports_slope() {
    let o = run(&["fit", "--sides", "4,6,8", "--mobility", "full"]);
    assert!(o.status.success());
    let s = value(&stdout(&o), "slope");
    assert!((s - 1.0).abs() < 0.1, "{s}");
}
