//! End-to-end checks of the command-line interface: golden stdout per
//! subcommand, exit codes, and byte stability across repeated runs.

use std::path::PathBuf;
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_bracketforge")
}

fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
}

fn fmt_path(file: &str) -> String {
    workspace_root()
        .join("formats")
        .join(file)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .env_remove("BRACKETFORGE_STATE_CAP")
        .output()
        .expect("binary runs")
}

fn golden(name: &str) -> Vec<u8> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
        .join(name);
    std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn assert_golden(args: &[&str], name: &str) {
    let first = run(args);
    assert!(
        first.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&first.stderr)
    );
    assert_eq!(
        first.stdout,
        golden(name),
        "{args:?} diverges from golden {name}"
    );
    // byte-for-byte stable on a second run
    let second = run(args);
    assert_eq!(first.stdout, second.stdout, "{args:?} is not byte-stable");
}

#[test]
fn validate_reports_ok() {
    let path = fmt_path("eight_with_bronze.fmt");
    assert_golden(&["validate", "--format", &path], "validate_ok.golden");
}

#[test]
fn build_emits_canonical_format_text() {
    assert_golden(&["build", "--signature", "4,0"], "build_4_0.golden");
}

#[test]
fn render_emits_dot() {
    let path = fmt_path("single_final.fmt");
    assert_golden(&["render", "--format", &path], "render_single_final.golden");
}

#[test]
fn render_writes_dot_file() {
    let path = fmt_path("single_final.fmt");
    let out = std::env::temp_dir().join("bracketforge_render_test.dot");
    let _ = std::fs::remove_file(&out);
    let result = run(&["render", "--format", &path, "--dot", out.to_str().unwrap()]);
    assert!(result.status.success());
    assert!(result.stdout.is_empty());
    assert_eq!(
        std::fs::read(&out).unwrap(),
        golden("render_single_final.golden")
    );
    let _ = std::fs::remove_file(&out);
}

#[test]
fn enumerate_json_and_csv() {
    let path = fmt_path("olympic_four.fmt");
    assert_golden(
        &[
            "enumerate",
            "--format",
            &path,
            "--model",
            "coin",
            "--out",
            "json",
        ],
        "enumerate_olympic_coin.json.golden",
    );
    assert_golden(
        &[
            "enumerate",
            "--format",
            &path,
            "--model",
            "coin",
            "--out",
            "csv",
        ],
        "enumerate_olympic_coin.csv.golden",
    );
}

#[test]
fn simulate_is_seeded_and_golden() {
    let path = fmt_path("single_final.fmt");
    assert_golden(
        &[
            "simulate",
            "--format",
            &path,
            "--model",
            "coin",
            "--reps",
            "200",
            "--seed",
            "42",
            "--workers",
            "2",
            "--out",
            "json",
        ],
        "simulate_final_coin.json.golden",
    );
}

#[test]
fn swiss_profile_json_and_csv() {
    assert_golden(
        &["swiss", "--teams", "8", "--rounds", "3", "--out", "json"],
        "swiss_8_3.json.golden",
    );
    assert_golden(
        &["swiss", "--teams", "8", "--rounds", "3", "--out", "csv"],
        "swiss_8_3.csv.golden",
    );
}

#[test]
fn swiss_profile_from_policy_file() {
    let path = fmt_path("swiss_eight.fmt");
    let output = run(&["swiss", "--format", &path, "--out", "json"]);
    assert!(output.status.success());
    assert_eq!(output.stdout, golden("swiss_8_3.json.golden"));
}

#[test]
fn compare_two_formats() {
    let a = fmt_path("eight_team_knockout.fmt");
    let b = fmt_path("reseed_eight.fmt");
    assert_golden(
        &[
            "compare", "--format", &a, "--format", &b, "--model", "coin", "--out", "json",
        ],
        "compare_eight.json.golden",
    );
}

#[test]
fn usage_errors_exit_two() {
    let output = run(&["no-such-command"]);
    assert_eq!(output.status.code(), Some(2));
    let output = run(&["enumerate"]);
    assert_eq!(
        output.status.code(),
        Some(2),
        "missing --format is a usage error"
    );
}

#[test]
fn domain_errors_exit_one_with_stderr_diagnostics() {
    let path = fmt_path("single_final.fmt");
    let output = run(&["simulate", "--format", &path, "--reps", "0"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(output.stdout.is_empty());
    assert!(String::from_utf8_lossy(&output.stderr).contains("replication"));

    let missing = fmt_path("no_such_file.fmt");
    let output = run(&["validate", "--format", &missing]);
    assert_eq!(output.status.code(), Some(1));

    let dynamic = fmt_path("swiss_eight.fmt");
    let output = run(&["render", "--format", &dynamic]);
    assert_eq!(output.status.code(), Some(1), "policies have no flowchart");
}

#[test]
fn invalid_format_files_fail_validation() {
    let dir = std::env::temp_dir().join("bracketforge_cli_invalid");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dup_place.fmt");
    std::fs::write(
        &path,
        "format \"broken\" {\n  match A: seed 1 vs seed 2 win place 1 lose place 1\n}\n",
    )
    .unwrap();
    let output = run(&["validate", "--format", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("PLACE"));
}

#[test]
fn state_cap_flag_and_env_override() {
    let path = fmt_path("eight_team_knockout.fmt");
    let output = run(&[
        "enumerate",
        "--format",
        &path,
        "--model",
        "coin",
        "--state-cap",
        "16",
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("state cap"));

    let output = Command::new(binary())
        .args(["enumerate", "--format", &path, "--model", "coin"])
        .env("BRACKETFORGE_STATE_CAP", "16")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "environment cap applies");

    // an explicit flag wins over the environment
    let output = Command::new(binary())
        .args([
            "enumerate",
            "--format",
            &path,
            "--model",
            "coin",
            "--state-cap",
            "4194304",
        ])
        .env("BRACKETFORGE_STATE_CAP", "16")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn bradley_terry_and_matrix_files_load() {
    let dir = std::env::temp_dir().join("bracketforge_cli_models");
    std::fs::create_dir_all(&dir).unwrap();
    let strengths = dir.join("strengths.csv");
    std::fs::write(&strengths, "strength\n2.0\n1.0\n").unwrap();
    let path = fmt_path("single_final.fmt");
    let output = run(&[
        "enumerate",
        "--format",
        &path,
        "--model",
        "bt",
        "--strengths",
        strengths.to_str().unwrap(),
        "--out",
        "csv",
    ]);
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("1,1,0.6666666666666666"), "{text}");

    let matrix = dir.join("matrix.csv");
    std::fs::write(&matrix, "0.0,0.7\n0.3,0.0\n").unwrap();
    let output = run(&[
        "enumerate",
        "--format",
        &path,
        "--model",
        "matrix",
        "--matrix",
        matrix.to_str().unwrap(),
        "--out",
        "csv",
    ]);
    assert!(output.status.success());
    assert!(String::from_utf8_lossy(&output.stdout).contains("1,1,0.7"));

    let bad = dir.join("bad_matrix.csv");
    std::fs::write(&bad, "0.0,0.7\n0.4,0.0\n").unwrap();
    let output = run(&[
        "enumerate",
        "--format",
        &path,
        "--model",
        "matrix",
        "--matrix",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("bad matrix"));
}
