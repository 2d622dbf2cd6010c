use std::path::{Path, PathBuf};
use std::process::Command as Process;

use superpoint_cli::{run, Command, Format, Outcome, RunConfig, EXIT_INPUT, EXIT_OK, EXIT_VALIDATION};

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn run_on(command: Command, file: &str, format: Format) -> Outcome {
    let mut config = RunConfig::new(command, golden(file));
    config.format = format;
    run(&config)
}

const COMMANDS: [(Command, &str); 4] =
    [(Command::Validate, "validate"), (Command::Decompose, "decompose"), (Command::Spectral, "spectral"), (Command::Eval, "eval")];

/// Set `UPDATE_GOLDEN=1` to rewrite the expected files.
#[test]
fn golden_reports_match() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for stem in ["diag12", "nilpotent", "scalar_soul", "joint", "bad_theta", "rotation"] {
        for (command, name) in COMMANDS {
            for (format, ext) in [(Format::Text, "txt"), (Format::Json, "json")] {
                let got = run_on(command, &format!("{stem}.json"), format).output;
                let path = golden(&format!("expected/{stem}.{name}.{ext}"));
                if update {
                    std::fs::write(&path, &got).unwrap();
                    continue;
                }
                let want = std::fs::read_to_string(&path).unwrap();
                assert_eq!(got, want, "{}", path.display());
            }
        }
    }
}

#[test]
fn outputs_are_deterministic() {
    for stem in ["diag12", "joint", "scalar_soul"] {
        for command in [Command::Decompose, Command::Spectral] {
            let a = run_on(command, &format!("{stem}.json"), Format::Json);
            let b = run_on(command, &format!("{stem}.json"), Format::Json);
            assert_eq!(a, b);
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run_on(Command::Decompose, "diag12.json", Format::Text).code, EXIT_OK);
    assert_eq!(run_on(Command::Validate, "bad_theta.json", Format::Text).code, EXIT_VALIDATION);
    assert_eq!(run_on(Command::Validate, "rotation.json", Format::Text).code, EXIT_VALIDATION);
    assert_eq!(run_on(Command::Spectral, "sqrt2.json", Format::Text).code, EXIT_VALIDATION);
    assert_eq!(run_on(Command::Eval, "sqrt2_hinted.json", Format::Text).code, EXIT_OK);
    assert_eq!(run_on(Command::Validate, "malformed.json", Format::Text).code, EXIT_INPUT);
    assert_eq!(run_on(Command::Hull, "diag12.json", Format::Text).code, EXIT_INPUT);
    assert_eq!(run_on(Command::Validate, "does-not-exist.json", Format::Text).code, EXIT_INPUT);
}

#[test]
fn violation_names_the_pair() {
    let out = run_on(Command::Validate, "bad_theta.json", Format::Json);
    let doc: serde_json::Value = serde_json::from_str(&out.output).unwrap();
    let v = &doc["report"]["violations"][0];
    assert_eq!(v["relation"], "theta-theta anticommute");
    assert_eq!(v["indices"], serde_json::json!([1, 1]));
}

#[test]
fn parse_errors_carry_position() {
    let out = run_on(Command::Validate, "malformed.json", Format::Text);
    assert!(out.output.contains("malformed.json:4:3:"), "{}", out.output);
}

#[test]
fn schema_errors_name_the_field() {
    let dir = std::env::temp_dir().join(format!("superpoint-schema-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("wrong_rank.json");
    std::fs::write(
        &path,
        r#"{"n": 1, "s1": 0, "r": 2, "matrices": {"y": [{"r": 3, "s": 0, "entries": [[1,0,0],[0,1,0],[0,0,1]]}]}}"#,
    )
    .unwrap();
    let out = run(&RunConfig::new(Command::Validate, &path));
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.output.contains("`matrices.y[0].r`"), "{}", out.output);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn eval_of_coordinate_echoes_matrix() {
    let dir = std::env::temp_dir().join(format!("superpoint-echo-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = std::fs::read_to_string(golden("joint.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&src).unwrap();
    doc["function"] = serde_json::json!("y1");
    let path = dir.join("echo.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let mut config = RunConfig::new(Command::Eval, &path);
    config.format = Format::Json;
    let out = run(&config);
    let got: serde_json::Value = serde_json::from_str(&out.output).unwrap();
    let input: superpoint::serial::InputFile = serde_json::from_value(doc).unwrap();
    let y1 = input.assignment(superpoint::Backend::Exact).unwrap().ys()[0].clone();
    assert_eq!(got["report"], serde_json::to_value(superpoint::serial::encode_matrix(&y1)).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_and_hull_pass_on_joint_example() {
    assert_eq!(run_on(Command::Verify, "joint.json", Format::Text).code, EXIT_OK);
    let hull = run_on(Command::Hull, "joint.json", Format::Json);
    assert_eq!(hull.code, EXIT_OK);
    let doc: serde_json::Value = serde_json::from_str(&hull.output).unwrap();
    assert_eq!(doc["report"]["axioms"]["checks"].as_array().unwrap().len(), 4);
}

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_superpoint"))
}

#[test]
fn binary_flags_and_environment() {
    let input = golden("diag12.json");
    let out = binary().args(["spectral"]).arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), std::fs::read_to_string(golden("expected/diag12.spectral.txt")).unwrap());

    // The document names no backend, so the environment decides unless a flag overrides it.
    let nil = golden("nilpotent.json");
    let out = binary().args(["decompose"]).arg(&nil).env("SUPERPOINT_BACKEND", "numeric").output().unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains("backend=numeric"));
    let out = binary()
        .args(["decompose", "--backend", "exact"])
        .arg(&nil)
        .env("SUPERPOINT_BACKEND", "numeric")
        .output()
        .unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains("backend=exact"));

    let target = std::env::temp_dir().join(format!("superpoint-out-{}.json", std::process::id()));
    let status = binary()
        .args(["decompose", "--format", "json", "--tol", "1e-10", "--merge", "commute", "--out"])
        .arg(&target)
        .arg(&input)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(doc["header"]["tol"], 1e-10);
    assert_eq!(doc["header"]["merge"], "commute");
    std::fs::remove_file(&target).unwrap();

    let out = binary().args(["validate"]).arg(golden("bad_theta.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = binary().args(["bogus"]).arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
