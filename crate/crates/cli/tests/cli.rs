//! End-to-end tests of the `avnbell` binary: exit codes, output formats,
//! schema validity of every JSON report, and byte-level determinism.

use jsonschema::JSONSchema;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_avnbell"))
}

fn manifest_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn assert_valid_against(schema_file: &str, instance: &serde_json::Value) {
    let raw = std::fs::read_to_string(manifest_path(&format!("schemas/{schema_file}")))
        .expect("schema file exists");
    let schema: serde_json::Value = serde_json::from_str(&raw).expect("schema parses");
    let compiled = JSONSchema::compile(&schema).expect("schema compiles");
    let errors: Vec<String> = match compiled.validate(instance) {
        Ok(()) => Vec::new(),
        Err(errors) => errors
            .map(|e| format!("{e} at {}", e.instance_path))
            .collect(),
    };
    assert!(
        errors.is_empty(),
        "instance violates {schema_file}:\n{}",
        errors.join("\n")
    );
}

fn json_output(args: &[&str]) -> serde_json::Value {
    let out = run(&[&["--format", "json"], args].concat());
    assert!(
        out.status.success() || out.status.code() == Some(1),
        "unexpected status {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_str(&stdout_of(&out)).expect("stdout is JSON")
}

#[test]
fn verify_quantum_passes_and_validates_schema() {
    let out = run(&["verify-quantum"]);
    assert_eq!(out.status.code(), Some(0));
    let json = json_output(&["verify-quantum"]);
    assert_valid_against("verify-quantum.schema.json", &json);
    assert_eq!(json["passed"], true);
    assert_eq!(json["beta_expectation"], 16.0);
    assert_eq!(json["identities"].as_array().unwrap().len(), 14);
}

#[test]
fn verify_quantum_reports_per_identity_residuals() {
    let json = json_output(&["verify-quantum"]);
    for row in json["identities"].as_array().unwrap() {
        assert!(row["residual"].as_f64().unwrap() >= 0.0);
    }
    // the state and operators are dyadic, so residuals are exactly zero and
    // even a zero tolerance passes
    let out = run(&["verify-quantum", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn classical_report_validates_schema() {
    let out = run(&["classical"]);
    assert_eq!(out.status.code(), Some(0));
    let json = json_output(&["classical"]);
    assert_valid_against("classical.schema.json", &json);
    assert_eq!(json["bound"]["max"], 8);
    assert_eq!(json["bound"]["min"], -8);
    assert_eq!(json["full_system_satisfiable"], false);
}

#[test]
fn game_report_validates_schema() {
    let out = run(&["game"]);
    assert_eq!(out.status.code(), Some(0));
    let json = json_output(&["game"]);
    assert_valid_against("game.schema.json", &json);
    assert_eq!(json["classical_optimum"], "3/4");
    assert_eq!(json["quantum_win_probability"], 1.0);
}

#[test]
fn threshold_reports_validate_schema() {
    for game in ["full", "reduced"] {
        let json = json_output(&["threshold", "--game", game, "--extended"]);
        assert_valid_against("threshold.schema.json", &json);
        assert_eq!(json["eta_star"], "3/4", "{game}");
        assert_eq!(json["extended"]["eta_star"], "7/8", "{game}");
        assert_eq!(json["verification"]["passed"], true);
        assert_eq!(json["extended"]["verification"]["passed"], true);

        let without = json_output(&["threshold", "--game", game]);
        assert_valid_against("threshold.schema.json", &without);
        assert!(without.get("extended").is_none());
    }
}

#[test]
fn bundled_mixture_files_validate_against_input_schema() {
    for file in ["data/y-refusal-model.json", "data/all-plus-model.json"] {
        let raw = std::fs::read_to_string(manifest_path(file)).unwrap();
        let value: serde_json::Value = serde_json::from_str(&raw).unwrap();
        assert_valid_against("mixture.schema.json", &value);
    }
}

#[test]
fn check_mixture_passes_the_refusal_model() {
    let path = manifest_path("data/y-refusal-model.json");
    let out = run(&["check-mixture", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let json = json_output(&["check-mixture", path.to_str().unwrap()]);
    assert_valid_against("check-mixture.schema.json", &json);
    assert_eq!(json["report"]["eta1"], "11/16");
    assert_eq!(json["report"]["conditional_win"], "1");
}

#[test]
fn check_mixture_fails_the_all_plus_model_with_exit_1() {
    let path = manifest_path("data/all-plus-model.json");
    let out = run(&["check-mixture", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let json = json_output(&["check-mixture", path.to_str().unwrap()]);
    assert_valid_against("check-mixture.schema.json", &json);
    let scenarios: Vec<&str> = json["report"]["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["scenario"].as_str().unwrap())
        .collect();
    assert!(scenarios.contains(&"(iii)-(iii)"));
    assert!(scenarios.contains(&"(iv)-(iv)"));
}

#[test]
fn check_mixture_distinguishes_input_errors() {
    // missing file
    let out = run(&["check-mixture", "/nonexistent/mixture.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));

    // malformed JSON
    let dir = tempfile::tempdir().unwrap();
    let bad_json = dir.path().join("bad.json");
    std::fs::write(&bad_json, b"{ not json").unwrap();
    let out = run(&["check-mixture", bad_json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot parse"));

    // weights violating the sum-to-one invariant
    let bad_weights = dir.path().join("weights.json");
    let mut f = std::fs::File::create(&bad_weights).unwrap();
    write!(
        f,
        r#"{{"components":[{{"alice":[1,1,1,1,1,1],"bob":[1,1,1,1,1,1],"weight":"2"}}]}}"#
    )
    .unwrap();
    let out = run(&["check-mixture", bad_weights.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sum to 2"));
}

#[test]
fn simulate_validates_schema_and_flags() {
    let json = json_output(&[
        "simulate",
        "--strategy",
        "quantum",
        "--rounds",
        "5000",
        "--seed",
        "7",
    ]);
    assert_valid_against("simulate.schema.json", &json);
    assert_eq!(json["conditional_win_rate"], 1.0);

    let model = manifest_path("data/y-refusal-model.json");
    let json = json_output(&[
        "simulate",
        "--strategy",
        &format!("lhv:{}", model.display()),
        "--rounds",
        "5000",
        "--seed",
        "7",
    ]);
    assert_valid_against("simulate.schema.json", &json);
    assert_eq!(json["conditional_win_rate"], 1.0);

    let out = run(&["simulate", "--strategy", "psychic", "--rounds", "10", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "simulate",
        "--strategy",
        "quantum",
        "--eta1",
        "1.5",
        "--rounds",
        "10",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid flags"));
}

#[test]
fn gaps_report_validates_schema_and_recomputes_this_work() {
    let out = run(&["gaps"]);
    assert_eq!(out.status.code(), Some(0));
    let json = json_output(&["gaps"]);
    assert_valid_against("gaps.schema.json", &json);
    let rows = json["rows"].as_array().unwrap();
    let computed: Vec<&serde_json::Value> =
        rows.iter().filter(|r| r["source"] == "computed").collect();
    assert_eq!(computed.len(), 1);
    assert_eq!(computed[0]["quantum_value"], 16.0);
    assert_eq!(computed[0]["classical_bound"], 8.0);
    assert_eq!(computed[0]["gap"], 8.0);
    let chsh = rows.iter().find(|r| r["name"] == "CHSH").unwrap();
    assert!((chsh["gap"].as_f64().unwrap() - 0.8284271247461903).abs() < 1e-12);
}

#[test]
fn every_format_is_supported_everywhere() {
    let model = manifest_path("data/y-refusal-model.json");
    let model_arg = format!("lhv:{}", model.display());
    let commands: Vec<Vec<&str>> = vec![
        vec!["verify-quantum"],
        vec!["classical"],
        vec!["game"],
        vec!["threshold", "--game", "reduced"],
        vec!["check-mixture", model.to_str().unwrap()],
        vec!["simulate", "--strategy", &model_arg, "--rounds", "1000", "--seed", "1"],
        vec!["gaps"],
    ];
    for cmd in &commands {
        for format in ["text", "json", "csv"] {
            let out = run(&[&["--format", format], cmd.as_slice()].concat());
            assert!(
                out.status.code() == Some(0),
                "{cmd:?} --format {format}: {:?}",
                out.status.code()
            );
            assert!(!out.stdout.is_empty(), "{cmd:?} {format} produced no output");
        }
    }
}

#[test]
fn format_env_variable_sets_the_default() {
    let out = bin()
        .args(["gaps"])
        .env("AVNBELL_FORMAT", "json")
        .output()
        .unwrap();
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert!(json.get("rows").is_some());

    // explicit flag still wins
    let out = bin()
        .args(["--format", "csv", "gaps"])
        .env("AVNBELL_FORMAT", "json")
        .output()
        .unwrap();
    assert!(stdout_of(&out).starts_with("name,quantum_value"));
}

#[test]
fn repeated_invocations_are_byte_identical() {
    let model = manifest_path("data/y-refusal-model.json");
    let model_arg = format!("lhv:{}", model.display());
    let commands: Vec<Vec<&str>> = vec![
        vec!["verify-quantum"],
        vec!["classical"],
        vec!["game"],
        vec!["threshold", "--game", "full", "--extended"],
        vec!["check-mixture", model.to_str().unwrap()],
        vec!["simulate", "--strategy", "quantum", "--rounds", "20000", "--seed", "123"],
        vec!["simulate", "--strategy", &model_arg, "--rounds", "20000", "--seed", "123"],
        vec!["gaps"],
    ];
    for cmd in &commands {
        for format in ["text", "json", "csv"] {
            let full: Vec<&str> = [&["--format", format], cmd.as_slice()].concat();
            let a = run(&full);
            let b = run(&full);
            assert_eq!(a.status.code(), b.status.code(), "{cmd:?}");
            assert_eq!(a.stdout, b.stdout, "{cmd:?} --format {format} output differs");
        }
    }
}

#[test]
fn csv_outputs_have_stable_headers() {
    let out = run(&["--format", "csv", "simulate", "--strategy", "quantum", "--rounds", "100", "--seed", "5"]);
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "scenario,asked,both_detected,won");
    // one row per scenario plus summary rows
    assert!(text.lines().count() >= 9);

    let out = run(&["--format", "csv", "classical"]);
    assert!(stdout_of(&out).starts_with("section,name,value"));
}
