use std::fs;
use std::path::Path;

use nlocal::cli::{run, EXIT_EXPECTATION, EXIT_INPUT, EXIT_OK, EXIT_RESOURCE};
use serde_json::Value;
use tempfile::TempDir;

fn nlocal(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("nlocal").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut full = vec!["generate"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--output", &path]);
    let (code, _, err) = nlocal(&full);
    assert_eq!(code, EXIT_OK, "{err}");
    path
}

#[test]
fn evaluate_bilocal_at_optimum() {
    let dir = TempDir::new().unwrap();
    let topo = generate(dir.path(), "chain.json", &["chain", "--n", "2"]);
    let (code, out, _) = nlocal(&["evaluate", "--topology", &topo, "--theta", "0.25pi,0.25pi", "--alpha", "pi/4,pi/4"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["S"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-8);
    assert_eq!(v["violated"], Value::Bool(true));
    assert_eq!(v["bound"].as_f64(), Some(1.0));
}

#[test]
fn expectation_and_input_errors() {
    let dir = TempDir::new().unwrap();
    let topo = generate(dir.path(), "star.json", &["star", "--n", "3"]);
    let (code, _, _) = nlocal(&[
        "evaluate",
        "--topology",
        &topo,
        "--theta",
        "0,0.25pi,0.25pi",
        "--alpha",
        "0.3,0.3,0.3",
        "--expect-violation",
    ]);
    assert_eq!(code, EXIT_EXPECTATION);
    let (code, _, err) = nlocal(&["evaluate", "--topology", &topo, "--theta", "0.1,0.2,0.3", "--alpha", "0.3"]);
    assert_eq!(code, EXIT_INPUT, "{err}");
    let (code, _, _) = nlocal(&["generate", "tree", "--n", "6", "--m", "3"]);
    assert_eq!(code, EXIT_INPUT);
    let (code, _, _) = nlocal(&["frobnicate"]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn validate_lists_violations() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    let bad = r#"{"n":2,"m":2,"p":2,"edges":[{"source":1,"ends":["B1","A1"]},{"source":1,"ends":["A1","A1"]}]}"#;
    fs::write(&path, bad).unwrap();
    let (code, out, _) = nlocal(&["validate", "--topology", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["valid"], Value::Bool(false));
    assert!(v["violations"].as_array().unwrap().len() >= 2);

    let good =
        generate(dir.path(), "custom.json", &["custom", "--n", "2", "--m", "2", "--p", "2", "--edges", "B1-A1,A1-B2"]);
    let (code, out, _) = nlocal(&["validate", "--topology", &good]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("\"valid\": true"));
}

#[test]
fn maximize_reports_equal_and_free_optimum() {
    let dir = TempDir::new().unwrap();
    let topo = generate(dir.path(), "star.json", &["star", "--n", "3"]);
    let (code, out, _) = nlocal(&["maximize", "--free", "--topology", &topo, "--theta", "0.25pi,0.25pi,0.25pi"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["smax"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-8);
    assert!((v["free"]["smax"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-8);
}

#[test]
fn sweep_writes_csv() {
    let dir = TempDir::new().unwrap();
    let topo = generate(dir.path(), "chain.json", &["chain", "--n", "2"]);
    let csv = dir.path().join("sweep.csv");
    let (code, _, _) =
        nlocal(&["sweep", "--topology", &topo, "--theta", "0,0.25pi,0.5pi", "--output", csv.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let text = fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta_1,theta_2,alpha_star,smax,violated");
    assert_eq!(lines.len(), 10);
    assert_eq!(lines.iter().filter(|l| l.ends_with(",true")).count(), 1);
}

#[test]
fn lhv_output_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let topo = generate(dir.path(), "chain.json", &["chain", "--n", "2"]);
    let model = dir.path().join("model.json");
    let args = ["lhv", "--topology", &topo, "--seed", "5", "--model", model.to_str().unwrap()];
    let (code, first, _) = nlocal(&args);
    assert_eq!(code, EXIT_OK);
    let (_, second, _) = nlocal(&args);
    assert_eq!(first, second);
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["certified"], Value::Bool(true));
    assert!(fs::read_to_string(model).unwrap().contains("source_weights"));

    let star = generate(dir.path(), "star4.json", &["star", "--n", "4"]);
    let (code, _, _) = nlocal(&["lhv", "--topology", &star]);
    assert_eq!(code, EXIT_RESOURCE);
}
