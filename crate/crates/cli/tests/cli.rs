//! End-to-end CLI behavior: task outputs, schema and domain error objects,
//! exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_finsler-lab")
}

fn write_scenario(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("finsler-lab-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn finsler-lab")
}

#[test]
fn geodesic_csv_ends_at_the_expected_point() {
    let path = write_scenario(
        "geo.json",
        r#"{"metric":"euclidean","task":"geodesic","x0":[0,0],"v0":[1,2],"span":[0,1]}"#,
    );
    let out = run(&["run", "--scenario", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().last().unwrap();
    let cells: Vec<f64> = last.split(',').map(|c| c.parse().unwrap()).collect();
    assert!((cells[0] - 1.0).abs() < 1e-12);
    assert!((cells[1] - 1.0).abs() < 1e-9 && (cells[2] - 2.0).abs() < 1e-9);
}

#[test]
fn sphere_conjugate_scenario_reports_pi() {
    let path = write_scenario(
        "conj.json",
        r#"{"metric":"sphere","task":"conjugate","x0":[1.5708,0],"v0":[0,1],"span":[0,3.5]}"#,
    );
    let out = run(&["run", "--scenario", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 1, "{text}");
    let t: f64 = rows[0].split(',').next().unwrap().parse().unwrap();
    assert!((t - std::f64::consts::PI).abs() < 1e-6);
}

#[test]
fn decreasing_span_is_a_schema_error() {
    let path = write_scenario(
        "bad_span.json",
        r#"{"metric":"euclidean","task":"geodesic","x0":[0,0],"v0":[1,2],"span":[1,0]}"#,
    );
    let out = run(&["run", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("span.decreasing"), "{text}");
}

#[test]
fn unknown_field_is_a_schema_error() {
    let path = write_scenario(
        "unknown.json",
        r#"{"metric":"euclidean","task":"geodesic","x0":[0,0],"v0":[1,2],"span":[0,1],"wat":3}"#,
    );
    let out = run(&["run", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("schema.parse"), "{text}");
}

#[test]
fn domain_exit_is_exit_code_2_with_error_object() {
    // a meridian run into the chart pole
    let path = write_scenario(
        "pole.json",
        r#"{"metric":"sphere","task":"geodesic","x0":[1.5707963267948966,0],"v0":[-1,0],"span":[0,2]}"#,
    );
    let out = run(&["run", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["error"]["code"], "domain.exit");
    let t_exit = doc["error"]["t_exit"].as_f64().unwrap();
    assert!((t_exit - std::f64::consts::FRAC_PI_2).abs() < 1e-2, "{t_exit}");
}

#[test]
fn task_subcommand_must_match_scenario() {
    let path = write_scenario(
        "mismatch.json",
        r#"{"metric":"euclidean","task":"geodesic","x0":[0,0],"v0":[1,2],"span":[0,1]}"#,
    );
    let out = run(&["exp", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("task.mismatch"), "{text}");
}

#[test]
fn validate_broken_metric_fails_with_nonzero_exit() {
    let out = run(&[
        "validate",
        "--metrics",
        "broken",
        "--samples",
        "20",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    // the homogeneity check must be the one that fails
    let line = text
        .lines()
        .find(|l| l.contains("L 2-homogeneity"))
        .expect("homogeneity row");
    assert!(line.ends_with("false"), "{line}");
}

#[test]
fn unknown_metric_is_a_schema_error() {
    let path = write_scenario(
        "nometric.json",
        r#"{"metric":"sphereee","task":"geodesic","x0":[0,0],"v0":[1,2],"span":[0,1]}"#,
    );
    let out = run(&["run", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("metric.unknown"), "{text}");
}

#[test]
fn exp_on_sphere_meridian() {
    let path = write_scenario(
        "exp.json",
        r#"{"metric":"sphere","task":"exp","x0":[1.5707963267948966,0],"v0":[-0.7853981633974483,0]}"#,
    );
    let out = run(&["exp", "--scenario", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert!((row[0] - std::f64::consts::FRAC_PI_4).abs() < 1e-8);
    assert!(row[1].abs() < 1e-8);
}
