//! End-to-end tests of the `dineq` binary: exit codes, stdout/stderr
//! separation, format selection, and determinism of seeded runs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dineq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dineq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is utf-8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is utf-8")
}

fn synth_to(path: &Path, extra: &[&str]) {
    let path = path.to_str().unwrap();
    let mut args = vec!["synth", "--output", path];
    args.extend_from_slice(extra);
    let output = dineq(&args);
    assert!(output.status.success(), "synth failed: {}", stderr(&output));
}

#[test]
fn synth_is_deterministic_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    synth_to(&a, &[]);
    synth_to(&b, &[]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let c = dir.path().join("c.csv");
    synth_to(&c, &["--seed", "43"]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn synth_stdout_has_schema_and_summary_goes_to_stderr() {
    let output = dineq(&[
        "synth",
        "--preset",
        "concentrated-nonfarm",
        "--n",
        "25",
        "--seed",
        "9",
    ]);
    assert!(output.status.success());
    let body = stdout(&output);
    let mut lines = body.lines();
    assert_eq!(
        lines.next().unwrap(),
        "household_id,district,stratum,farm_income,nonfarm_income,transfer_income,weight"
    );
    assert_eq!(body.lines().count(), 26);
    let notes = stderr(&output);
    assert!(notes.contains("income shares"));
    assert!(notes.contains("seed 9"));
}

#[test]
fn fgt_json_has_the_documented_shape() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("survey.csv");
    synth_to(&input, &[]);
    let output = dineq(&[
        "fgt",
        "--input",
        input.to_str().unwrap(),
        "--output-format",
        "json",
    ]);
    assert!(output.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(doc["poverty_line"], 700.0);
    assert_eq!(doc["n"], 381);
    assert_eq!(doc["base_bundle"], "farm");
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    assert!(rows[0]["pct_change"].is_null());
    assert!(rows[3]["pct_change"].is_number());
}

#[test]
fn fgt_accepts_a_custom_alpha_list_and_poverty_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("survey.csv");
    synth_to(&input, &[]);
    let output = dineq(&[
        "fgt",
        "--input",
        input.to_str().unwrap(),
        "--poverty-line",
        "500",
        "--alphas",
        "0,0.5",
        "--output-format",
        "json",
    ]);
    assert!(output.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(doc["poverty_line"], 500.0);
    let alphas: Vec<f64> = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["alpha"].as_f64().unwrap())
        .collect();
    assert!(alphas.contains(&0.5));
    assert!(!alphas.contains(&2.0));
}

#[test]
fn gini_csv_uses_the_fixed_header_and_total_row() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("survey.csv");
    synth_to(&input, &[]);
    let output = dineq(&[
        "gini",
        "--input",
        input.to_str().unwrap(),
        "--output-format",
        "csv",
    ]);
    assert!(output.status.success());
    let body = stdout(&output);
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(
        lines[0],
        "source,share,source_gini,gini_correlation,relative_contribution,marginal_effect"
    );
    assert!(lines[1].starts_with("farm,"));
    assert!(lines[4].starts_with("total,1,"));
    assert_eq!(lines.len(), 5);
}

#[test]
fn report_json_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("survey.csv");
    synth_to(&input, &[]);
    let args = [
        "report",
        "--input",
        input.to_str().unwrap(),
        "--output-format",
        "json",
        "--verify",
    ];
    let first = dineq(&args);
    let second = dineq(&args);
    assert!(first.status.success(), "{}", stderr(&first));
    assert_eq!(first.stdout, second.stdout);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert!(doc["summary"]["gini_change_from_base"]["base_gini"].is_number());
}

#[test]
fn report_rejects_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("survey.csv");
    synth_to(&input, &[]);
    let output = dineq(&[
        "report",
        "--input",
        input.to_str().unwrap(),
        "--output-format",
        "csv",
    ]);
    assert!(!output.status.success());
    assert!(stdout(&output).is_empty());
    assert!(stderr(&output).starts_with("error:"));
    assert!(stderr(&output).contains("no csv form"));
}

#[test]
fn verify_command_reports_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("survey.csv");
    synth_to(&input, &[]);
    let output = dineq(&["verify", "--input", input.to_str().unwrap()]);
    assert!(output.status.success());
    let body = stdout(&output);
    for name in [
        "gini-covariance-vs-pairwise",
        "rank-mean-one-half",
        "decomposition-residual",
        "contribution-sum-is-one",
        "marginal-effect-sum-is-zero",
        "marginal-effect-vs-finite-difference",
        "fgt-nonincreasing-in-alpha",
    ] {
        assert!(body.contains(name), "missing check {name} in:\n{body}");
    }
    assert!(body.contains("verification passed"));
    assert!(!body.contains("FAIL"));
}

#[test]
fn missing_input_fails_with_an_error_line() {
    let output = dineq(&["gini", "--input", "/no/such/file.csv"]);
    assert!(!output.status.success());
    assert_eq!(output.status.code(), Some(1));
    assert!(stdout(&output).is_empty());
    assert!(stderr(&output).starts_with("error: failed to read /no/such/file.csv"));
}

#[test]
fn malformed_csv_names_the_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(
        &input,
        "household_id,farm_income,nonfarm_income,transfer_income\n\
         h1,100,200,0\n\
         h2,oops,0,0\n",
    )
    .unwrap();
    let output = dineq(&["fgt", "--input", input.to_str().unwrap()]);
    assert!(!output.status.success());
    let message = stderr(&output);
    assert!(message.contains("line 3"), "{message}");
    assert!(message.contains("farm_income"), "{message}");
    assert!(message.contains("oops"), "{message}");
}

#[test]
fn negative_amounts_require_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("loss.csv");
    fs::write(
        &input,
        "household_id,farm_income,nonfarm_income,transfer_income\n\
         h1,-100,600,0\n\
         h2,300,0,0\n",
    )
    .unwrap();
    let refused = dineq(&["gini", "--input", input.to_str().unwrap()]);
    assert!(!refused.status.success());
    assert!(stderr(&refused).contains("negative amount"));

    let allowed = dineq(&[
        "gini",
        "--input",
        input.to_str().unwrap(),
        "--allow-negative",
    ]);
    assert!(allowed.status.success(), "{}", stderr(&allowed));
}

#[test]
fn unknown_preset_and_unknown_flag_fail() {
    let preset = dineq(&["synth", "--preset", "mystery"]);
    assert!(!preset.status.success());
    assert!(stderr(&preset).contains("unknown preset"));

    let flag = dineq(&["fgt", "--no-such-flag"]);
    assert!(!flag.status.success());
}

#[test]
fn transfers_aimed_at_the_poor_read_as_equalizing() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("targeted.csv");
    // transfers shrink as farm income grows, so their rank correlation
    // with total income is negative
    fs::write(
        &input,
        "household_id,farm_income,nonfarm_income,transfer_income\n\
         h1,200,0,400\n\
         h2,300,50,350\n\
         h3,800,100,50\n\
         h4,1200,200,20\n\
         h5,2000,500,0\n\
         h6,2600,700,0\n",
    )
    .unwrap();

    let output = dineq(&["report", "--input", input.to_str().unwrap()]);
    assert!(output.status.success(), "{}", stderr(&output));
    let body = stdout(&output);
    let equalizing = body
        .lines()
        .find(|l| l.starts_with("- Equalizing sources"))
        .expect("summary lists equalizing sources");
    assert!(equalizing.contains("transfer"), "{equalizing}");
    let disequalizing = body
        .lines()
        .find(|l| l.starts_with("- Disequalizing sources"))
        .expect("summary lists disequalizing sources");
    assert!(!disequalizing.contains("transfer"), "{disequalizing}");
}

#[test]
fn synth_rejects_zero_households() {
    let output = dineq(&["synth", "--n", "0"]);
    assert!(!output.status.success());
    assert!(stdout(&output).is_empty());
    assert!(stderr(&output).starts_with("error:"));
    assert!(stderr(&output).contains("at least one household"));
}

#[test]
fn custom_config_file_drives_synth() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("tiny.toml");
    fs::write(
        &config,
        r#"
        n_households = 12
        seed = 3

        [[sources]]
        name = "farm"
        participation = 1.0
        log_mean = 6.0
        log_sd = 0.4

        [[sources]]
        name = "nonfarm"
        participation = 0.5
        log_mean = 5.0
        log_sd = 0.6

        [[sources]]
        name = "transfer"
        participation = 0.5
        log_mean = 4.0
        log_sd = 0.5
        "#,
    )
    .unwrap();
    let output = dineq(&["synth", "--config", config.to_str().unwrap()]);
    assert!(output.status.success(), "{}", stderr(&output));
    assert_eq!(stdout(&output).lines().count(), 13);
    assert!(stderr(&output).contains("n = 12"));
}
