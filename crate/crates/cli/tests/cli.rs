//! End-to-end tests of the binary: exit codes, report contents, file
//! emission, and schema validity.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn hgp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn schema() -> jsonschema::JSONSchema {
    let raw: serde_json::Value =
        serde_json::from_str(include_str!("../schemas/report.schema.json")).unwrap();
    jsonschema::JSONSchema::compile(&raw).expect("schema compiles")
}

fn assert_valid(schema: &jsonschema::JSONSchema, value: &serde_json::Value) {
    if let Err(errors) = schema.validate(value) {
        let msgs: Vec<String> = errors.map(|e| format!("{e}")).collect();
        panic!("schema violations: {msgs:?}\nin {value}");
    }
}

#[test]
fn premium_of_uniform4_is_expected_shortfall() {
    let input = fixture("uniform4.csv");
    let out = hgp(&[
        "premium",
        "--phi",
        "identity",
        "--alpha",
        "0.5",
        "--input",
        input.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(out.status.success(), "{out:?}");
    let v = stdout_json(&out);
    assert!((v["result"]["value"].as_f64().unwrap() - 3.5).abs() < 1e-9);
    assert_valid(&schema(), &v);
}

#[test]
fn premium_of_constant_under_power_gauge() {
    let input = fixture("const2.csv");
    let out = hgp(&[
        "premium",
        "--phi",
        "power",
        "--p",
        "2",
        "--alpha",
        "0.5",
        "--input",
        input.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["result"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-8);
}

#[test]
fn premium_of_quantile_family_under_exponential_gauge() {
    let out = hgp(&[
        "premium",
        "--phi",
        "exponential",
        "--alpha",
        "0.5",
        "--quantile",
        "log-singular",
        "--no-timestamp",
    ]);
    assert!(out.status.success(), "{out:?}");
    let v = stdout_json(&out);
    let value = v["result"]["value"].as_f64().unwrap();
    assert!(value.is_finite() && value > 1.0, "got {value}");
    assert_valid(&schema(), &v);
}

#[test]
fn malformed_csv_reports_row_number_and_exits_2() {
    let input = fixture("malformed.csv");
    let out = hgp(&[
        "premium",
        "--input",
        input.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("row 2"), "stderr: {stderr}");
}

#[test]
fn non_member_is_a_domain_rejection() {
    // Pareto tail with γ = 2 is not integrable, so it falls outside L^Φ for
    // the identity gauge
    let out = hgp(&[
        "premium",
        "--phi",
        "identity",
        "--quantile",
        "power-tail",
        "--gamma",
        "2.0",
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn unknown_gauge_and_unknown_experiment_exit_2() {
    let out = hgp(&["premium", "--phi", "nope", "--input", "x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let out = hgp(&["stability", "bogus", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("fatou"), "lists valid names: {stderr}");
}

#[test]
fn es_command_matches_piecewise_integral() {
    let input = fixture("uniform4.csv");
    let out = hgp(&[
        "es",
        "--alpha",
        "0.5",
        "--input",
        input.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["result"]["value"].as_f64().unwrap() - 3.5).abs() < 1e-12);
    assert_valid(&schema(), &v);
}

#[test]
fn norm_command_reports_both_norms() {
    let input = fixture("uniform4.csv");
    let out = hgp(&[
        "norm",
        "--phi",
        "power",
        "--p",
        "2",
        "--alpha",
        "0.75",
        "--input",
        input.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    // E[X²] = 7.5, so ‖X‖ = √7.5 and N_α scales by 1/√(1−α) = 2
    let lux = v["result"]["luxemburg"]["value"].as_f64().unwrap();
    let scaled = v["result"]["scaled"]["value"].as_f64().unwrap();
    assert!((lux - 7.5f64.sqrt()).abs() < 1e-8);
    assert!((scaled - 2.0 * 7.5f64.sqrt()).abs() < 1e-7);
    assert_valid(&schema(), &v);
}

#[test]
fn dual_command_closes_the_gap_on_identity() {
    let input = fixture("uniform4.csv");
    let out = hgp(&[
        "dual",
        "--phi",
        "identity",
        "--alpha",
        "0.5",
        "--input",
        input.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(out.status.success(), "{out:?}");
    let v = stdout_json(&out);
    assert!(v["result"]["gap"].as_f64().unwrap().abs() <= 1e-6);
    assert!((v["result"]["dual"].as_f64().unwrap() - 3.5).abs() < 1e-6);
    assert!(v["result"]["pass"].as_bool().unwrap());
    assert_valid(&schema(), &v);
}

#[test]
fn dual_command_rejects_wide_gap_with_exit_1() {
    let input = fixture("three_atoms.csv");
    let out = hgp(&[
        "dual",
        "--phi",
        "power",
        "--p",
        "2",
        "--input",
        input.to_str().unwrap(),
        "--duality-gap",
        "1e-18",
        "--no-timestamp",
    ]);
    // an absurdly tight gap requirement must flip the exit code, not the report
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let v = stdout_json(&out);
    assert!(v["result"]["gap"].as_f64().unwrap().abs() <= 1e-4);
}

#[test]
fn dual_command_enforces_atom_limit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("many.csv");
    let rows: String = (0..17).map(|i| format!("{i}\n")).collect();
    std::fs::write(&path, rows).unwrap();
    let out = hgp(&["dual", "--input", path.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn three_atom_dual_matches_power_gauge_primal() {
    let input = fixture("three_atoms.csv");
    let out = hgp(&[
        "dual",
        "--phi",
        "power",
        "--p",
        "2",
        "--alpha",
        "0.5",
        "--input",
        input.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let primal = v["result"]["primal"].as_f64().unwrap();
    let dual = v["result"]["dual"].as_f64().unwrap();
    assert!((primal - dual).abs() <= 1e-4 * primal.abs().max(1.0));
}

#[test]
fn catalog_lists_the_builtin_gauges() {
    let out = hgp(&["catalog", "--no-timestamp"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let names: Vec<&str> = v["result"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        vec![
            "identity",
            "power",
            "exponential",
            "square-exponential",
            "kinked-linear"
        ]
    );
    assert_valid(&schema(), &v);
}

#[test]
fn stability_counterexample_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = hgp(&[
        "stability",
        "dist-counterexample",
        "--phi",
        "identity",
        "--alpha",
        "0.5",
        "--n-max",
        "25",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(out.status.success(), "{out:?}");
    let report_path = dir.path().join("dist-counterexample.report.json");
    let csv_path = dir.path().join("dist-counterexample.csv");
    assert!(report_path.exists() && csv_path.exists());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert!(v["result"]["passed"].as_bool().unwrap());
    assert_valid(&schema(), &v);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("n,premium,n_alpha,mean,modular"));
    assert_eq!(csv.lines().count(), 26);
}

#[test]
fn stability_lebesgue_failure_passes_and_writes_contrast() {
    let dir = tempfile::tempdir().unwrap();
    let out = hgp(&[
        "stability",
        "lebesgue-failure",
        "--phi",
        "exponential",
        "--alpha",
        "0.5",
        "--n-max",
        "8",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(out.status.success(), "{out:?}");
    assert!(dir.path().join("lebesgue-failure-contrast.csv").exists());
}

#[test]
fn stability_fatou_with_power_gauge() {
    let dir = tempfile::tempdir().unwrap();
    let out = hgp(&[
        "stability",
        "fatou",
        "--phi",
        "power",
        "--p",
        "2",
        "--alpha",
        "0.9",
        "--n-max",
        "30",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(out.status.success(), "{out:?}");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.json");
    std::fs::write(
        &cfg_path,
        r#"{ "phi": {"name": "power", "p": 2.0}, "alpha": 0.9 }"#,
    )
    .unwrap();
    let input = fixture("uniform4.csv");
    // flag overrides the file's alpha; phi comes from the file
    let out = hgp(&[
        "premium",
        "--config",
        cfg_path.to_str().unwrap(),
        "--alpha",
        "0.5",
        "--input",
        input.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(out.status.success(), "{out:?}");
    let v = stdout_json(&out);
    assert_eq!(v["phi"]["name"], "power");
    assert_eq!(v["config"]["alpha"], 0.5);
    let expected = 3.0 + 1.0 / 3f64.sqrt();
    assert!((v["result"]["value"].as_f64().unwrap() - expected).abs() < 1e-8);
}

#[test]
fn floats_are_printed_with_twelve_significant_digits() {
    let input = fixture("uniform4.csv");
    let out = hgp(&[
        "premium",
        "--phi",
        "power",
        "--p",
        "2",
        "--alpha",
        "0.5",
        "--input",
        input.to_str().unwrap(),
        "--no-timestamp",
    ]);
    let v = stdout_json(&out);
    let value = v["result"]["value"].as_f64().unwrap();
    // 3 + 1/√3 rounded to 12 significant digits
    assert_eq!(value, 3.57735026919);
}
