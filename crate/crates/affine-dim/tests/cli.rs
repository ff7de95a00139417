//! Behavior of the `affine-dim` binary: output formats, report gating, and
//! the exit-code contract (0 success, 1 spec-file problems, 2 runtime
//! failures).

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_affine-dim")
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

const SEPARATED: &str = r#"{
    "version": 1,
    "matrices": [[0.5, 0.0, 0.0, 0.25], [0.5, 0.0, 0.0, 0.25]],
    "translations": [[0.0, 0.0], [0.5, 0.75]],
    "budgets": {"pressure_depth": 8, "cylinder_depth": 4, "cloud_depth": 10}
}"#;

const CONFORMAL: &str = r#"{
    "version": 1,
    "matrices": [
        [0.3333333333333333, 0.0, 0.0, 0.3333333333333333],
        [0.3333333333333333, 0.0, 0.0, 0.3333333333333333]
    ],
    "budgets": {"pressure_depth": 6}
}"#;

const POSITIVE: &str = r#"{
    "version": 1,
    "matrices": [[0.5, 0.4, 0.1, 0.1], [0.4, 0.1, 0.2, 0.3]],
    "budgets": {"pressure_depth": 8}
}"#;

#[test]
fn pressure_rows_match_the_conformal_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "conformal.json", CONFORMAL);
    let output = run(&["pressure", "--spec", &spec, "--depth", "6"]);
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,s,pressure"));
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 3, "bad row {line:?}");
        let s: f64 = fields[1].parse().unwrap();
        let p: f64 = fields[2].parse().unwrap();
        let oracle = 2f64.ln() - s * 3f64.ln();
        assert!(
            (p - oracle).abs() < 1e-12,
            "row {line:?}: {p} vs closed form {oracle}"
        );
        rows += 1;
    }
    assert_eq!(rows, 6 * 25);
}

#[test]
fn directions_on_a_diagonal_system_share_one_strong_stable_angle() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "diag.json",
        r#"{
            "version": 1,
            "matrices": [[0.5, 0.0, 0.0, 0.25], [0.5, 0.0, 0.0, 0.25]]
        }"#,
    );
    let output = run(&["directions", "--spec", &spec, "--depth", "10"]);
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("word,stable_angle,strong_stable_angle,error_bound")
    );
    let angles: Vec<f64> = lines
        .map(|line| line.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(angles.len(), 20);
    for &angle in &angles {
        assert!(
            (angle - std::f64::consts::FRAC_PI_2).abs() < 1e-12,
            "strong-stable angle {angle} should be pi/2"
        );
    }
}

#[test]
fn render_writes_one_row_per_word_and_an_svg() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "separated.json", SEPARATED);
    let out = dir.path().join("files");
    let output = run(&[
        "render",
        "--spec",
        &spec,
        "--depth",
        "14",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let csv = std::fs::read_to_string(out.join("attractor.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,word"));
    assert_eq!(lines.count(), 1 << 14);
    let svg = std::fs::read_to_string(out.join("attractor.svg")).unwrap();
    assert!(svg.contains(r#"viewBox="0 0 1000 1000""#));
    assert!(svg.contains("<circle"));
}

#[test]
fn dimension_report_flags_violated_separation() {
    let dir = tempfile::tempdir().unwrap();
    // Two identical maps: the pieces coincide.
    let spec = write_spec(
        dir.path(),
        "overlap.json",
        r#"{
            "version": 1,
            "matrices": [[0.5, 0.0, 0.0, 0.25], [0.5, 0.0, 0.0, 0.25]],
            "translations": [[0.0, 0.0], [0.0, 0.0]],
            "budgets": {"pressure_depth": 6, "cylinder_depth": 4, "cloud_depth": 8}
        }"#,
    );
    let output = run(&["dimension", "--spec", &spec]);
    assert!(output.status.success(), "gating must not change exit codes");
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let verdict = &report["geometry"]["ssc"]["verdict"];
    assert_eq!(verdict["Violated"].is_object(), true, "verdict: {verdict}");
    assert_eq!(report["dimension_chain_applicable"], false);
}

#[test]
fn relaxed_bound_flag_switches_the_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "positive.json", POSITIVE);
    let strict = run(&["dimension", "--spec", &spec]);
    assert!(strict.status.success());
    let strict: serde_json::Value = serde_json::from_slice(&strict.stdout).unwrap();
    assert_eq!(strict["conditions"]["classes"]["threshold"], 5.0 / 3.0);
    assert_eq!(strict["conditions"]["classes"]["relaxed"], false);

    let relaxed = run(&["dimension", "--spec", &spec, "--relaxed-bound"]);
    assert!(relaxed.status.success());
    let relaxed: serde_json::Value = serde_json::from_slice(&relaxed.stdout).unwrap();
    assert_eq!(relaxed["conditions"]["classes"]["threshold"], 1.5);
    assert_eq!(relaxed["conditions"]["classes"]["relaxed"], true);
}

#[test]
fn schema_problems_exit_1_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();

    let unknown = write_spec(
        dir.path(),
        "unknown.json",
        r#"{"version": 1, "matrices": [[0.5, 0.0, 0.0, 0.25]], "matrcies": []}"#,
    );
    let output = run(&["dimension", "--spec", &unknown]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("matrcies"), "stderr: {stderr}");
    assert!(stderr.contains("line"), "stderr: {stderr}");

    let missing = dir.path().join("absent.json");
    let output = run(&["dimension", "--spec", missing.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));

    let expanding = write_spec(
        dir.path(),
        "expanding.json",
        r#"{"version": 1, "matrices": [[1.5, 0.0, 0.0, 0.25]]}"#,
    );
    let output = run(&["dimension", "--spec", &expanding]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn violated_preconditions_exit_2() {
    let dir = tempfile::tempdir().unwrap();

    // Geometry command without translations.
    let positive = write_spec(dir.path(), "positive.json", POSITIVE);
    let output = run(&["render", "--spec", &positive]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("translations"), "stderr: {stderr}");

    // Transversality on a system outside its domain.
    let diagonal = write_spec(
        dir.path(),
        "diag.json",
        r#"{
            "version": 1,
            "matrices": [[0.5, 0.0, 0.0, 0.25], [0.5, 0.0, 0.0, 0.25]],
            "budgets": {"pressure_depth": 6}
        }"#,
    );
    let output = run(&["transversality", "--spec", &diagonal]);
    assert_eq!(output.status.code(), Some(2));

    // Directions on a system with no dominated splitting.
    let rotation = write_spec(
        dir.path(),
        "rotation.json",
        r#"{
            "version": 1,
            "matrices": [[0.0, -0.5, 0.5, 0.0], [0.0, -0.5, 0.5, 0.0]],
            "budgets": {"pressure_depth": 6}
        }"#,
    );
    let output = run(&["directions", "--spec", &rotation]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn dimension_report_writes_the_out_file_too() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "separated.json", SEPARATED);
    let out = dir.path().join("reports");
    let output = run(&["dimension", "--spec", &spec, "--out", out.to_str().unwrap()]);
    assert!(output.status.success());
    let on_disk = std::fs::read(out.join("dimension.json")).unwrap();
    assert_eq!(on_disk, output.stdout);
}
