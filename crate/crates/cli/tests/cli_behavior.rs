//! Black-box checks of the binary: exit-code contract, subcommand flows,
//! and output routing.

use std::path::Path;
use std::process::{Command, Output};

use imts_core::fixtures;

fn imts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imts"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn imts_in(dir: &Path, args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_imts"));
    cmd.current_dir(dir).args(args);
    for (key, value) in envs {
        cmd.env(key, value);
    }
    cmd.output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write_fixture_workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let files = [
        ("table1.csv", fixtures::TABLE1_CSV),
        ("table1_hierarchy.json", fixtures::TABLE1_HIERARCHY_JSON),
        ("table6.csv", fixtures::TABLE6_CSV),
        ("table6_hierarchy.json", fixtures::TABLE6_HIERARCHY_JSON),
        ("pipeline.json", fixtures::PIPELINE_CONFIG_JSON),
    ];
    for (name, contents) in files {
        std::fs::write(dir.path().join(name), contents).unwrap();
    }
    dir
}

/// A dataset whose classes stay separable in every fold, so cross-validation
/// runs clean end to end (unlike the bundled reference data, whose classes
/// contain near-constant columns that any split degenerates).
fn separable_ranking_csv() -> String {
    let mut text = String::from("alternative_id,f1,f2,f3,decision_class\n");
    let centers = [(0.0, 0.0, 0.0), (10.0, 10.0, 10.0), (20.0, 0.0, 20.0)];
    for (c, (x, y, z)) in centers.iter().enumerate() {
        for i in 0..8 {
            let jitter = 0.05 * ((i + 3 * c) % 8 + 1) as f64;
            let sign = if (i + c) % 2 == 0 { 1.0 } else { -1.0 };
            text.push_str(&format!(
                "r{c}_{i},{},{},{},class{c}\n",
                x + sign * jitter,
                y + sign * 2.0 * jitter,
                z + jitter * (i % 3 + 1) as f64,
            ));
        }
    }
    text
}

#[test]
fn missing_input_file_exits_with_the_io_code() {
    let output = imts(&["train", "--ranking", "/definitely/not/here.csv"]);
    assert_eq!(output.status.code(), Some(5));
    assert!(stderr(&output).contains("error[IO]"));
}

#[test]
fn invalid_option_combinations_exit_with_the_config_code() {
    let dir = write_fixture_workspace();

    let output = imts_in(dir.path(), &["pipeline", "--config", "pipeline.json", "--folds", "1"], &[]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("error[INVALID_FOLDS]"));

    let output = imts_in(
        dir.path(),
        &["train", "--ranking", "table6.csv", "--policy", "cholesky"],
        &[],
    );
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("error[INVALID_POLICY]"));

    let output = imts_in(
        dir.path(),
        &[
            "weights",
            "--data",
            "table1.csv",
            "--hierarchy",
            "table1_hierarchy.json",
            "--threshold",
            "0",
        ],
        &[],
    );
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("error[INVALID_THRESHOLD]"));
}

#[test]
fn unknown_flags_are_hard_errors() {
    let output = imts(&["train", "--no-such-flag"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn every_subcommand_documents_itself() {
    for sub in [
        "weights",
        "aggregate",
        "train",
        "classify",
        "evaluate",
        "pipeline",
        "reproduce",
    ] {
        let output = imts(&[sub, "--help"]);
        assert_eq!(output.status.code(), Some(0), "{sub} --help failed");
        assert!(stdout(&output).contains("--help"));
    }
}

#[test]
fn constant_column_errors_exit_with_the_data_code() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("flat.csv"),
        "alternative_id,sfa,sfb,decision_class\nr1,1,7,x\nr2,2,7,x\nr3,3,7,x\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("flat_hierarchy.json"),
        r#"{"main_factors":[{"id":"mf","name":"mf","sub_factors":[{"id":"sfa","name":"a"},{"id":"sfb","name":"b"}]}]}"#,
    )
    .unwrap();
    let output = imts_in(
        dir.path(),
        &["weights", "--data", "flat.csv", "--hierarchy", "flat_hierarchy.json"],
        &[],
    );
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr(&output).contains("error[CONSTANT_COLUMN]"));

    // The escape hatch keeps the column and treats it as ideal.
    let output = imts_in(
        dir.path(),
        &[
            "weights",
            "--data",
            "flat.csv",
            "--hierarchy",
            "flat_hierarchy.json",
            "--constant-columns",
            "treat-as-ideal",
        ],
        &[],
    );
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
}

#[test]
fn numeric_failures_exit_with_the_numeric_code() {
    let dir = write_fixture_workspace();

    // The reference data is rank-deficient; a strict inverse must refuse.
    let output = imts_in(
        dir.path(),
        &["train", "--ranking", "table6.csv", "--policy", "strict"],
        &[],
    );
    assert_eq!(output.status.code(), Some(4));
    assert!(stderr(&output).contains("error[SINGULAR]"));

    // Any fold of the reference data leaves a constant column in some class.
    let output = imts_in(
        dir.path(),
        &["evaluate", "--ranking", "table6.csv", "--folds", "5"],
        &[],
    );
    assert_eq!(output.status.code(), Some(4));
    assert!(stderr(&output).contains("error[ZERO_STD]"));
}

#[test]
fn reproduce_passes_every_target() {
    for target in ["t4", "t5", "t6_check", "t7", "t8_imts", "t9_imts"] {
        let output = imts(&["reproduce", target]);
        assert_eq!(output.status.code(), Some(0), "reproduce {target} failed");
        let text = stdout(&output);
        assert!(text.trim_end().ends_with("PASS"), "reproduce {target}: {text}");
    }
}

#[test]
fn stagewise_flow_reproduces_the_pipeline_artifacts() {
    let dir = write_fixture_workspace();

    // weights on the soil dataset
    let output = imts_in(
        dir.path(),
        &[
            "weights",
            "--data",
            "table1.csv",
            "--hierarchy",
            "table1_hierarchy.json",
            "--out",
            ".",
        ],
        &[],
    );
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let weights_text = std::fs::read_to_string(dir.path().join("weights_mf1.csv")).unwrap();
    assert!(weights_text.starts_with("# main_factor: mf1\n"));

    // aggregate consumes the weight file it just wrote
    let output = imts_in(
        dir.path(),
        &[
            "aggregate",
            "--data",
            "table1.csv",
            "--hierarchy",
            "table1_hierarchy.json",
            "--weights",
            "weights_mf1.csv",
            "--out",
            "ranking_t1.csv",
        ],
        &[],
    );
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let ranking = std::fs::read_to_string(dir.path().join("ranking_t1.csv")).unwrap();
    assert!(ranking.starts_with("alternative_id,mf1,decision_class\n"));
    assert_eq!(ranking.lines().count(), 6);

    // train -> classify -> evaluate --import on the reference ranking data
    let output = imts_in(
        dir.path(),
        &["train", "--ranking", "table6.csv", "--out-dir", "models"],
        &[],
    );
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let output = imts_in(
        dir.path(),
        &[
            "classify",
            "--models",
            "models",
            "--data",
            "table6.csv",
            "--out",
            "pred.csv",
        ],
        &[],
    );
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let output = imts_in(
        dir.path(),
        &[
            "evaluate",
            "--ranking",
            "table6.csv",
            "--import",
            "pred.csv",
            "--format",
            "csv",
        ],
        &[],
    );
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let report = stdout(&output);
    assert!(report.contains("accuracy,100.000000"));
    assert!(report.contains("mae,0.000000"));

    // The full pipeline agrees with the stagewise artifacts.
    let output = imts_in(
        dir.path(),
        &["pipeline", "--config", "pipeline.json", "--output-dir", "full"],
        &[],
    );
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let stage_pred = std::fs::read_to_string(dir.path().join("pred.csv")).unwrap();
    let pipe_pred = std::fs::read_to_string(dir.path().join("full/predictions.csv")).unwrap();
    assert_eq!(stage_pred, pipe_pred);

    // Model files round-trip through the documented JSON layout.
    let model_text =
        std::fs::read_to_string(dir.path().join("models/00_paddy.json")).unwrap();
    assert!(model_text.contains("\"class_name\": \"paddy\""));
}

#[test]
fn cross_validation_succeeds_on_separable_data_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("sep.csv"), separable_ranking_csv()).unwrap();
    let args = [
        "evaluate",
        "--ranking",
        "sep.csv",
        "--folds",
        "4",
        "--seed",
        "9",
        "--format",
        "csv",
    ];
    let first = imts_in(dir.path(), &args, &[]);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert!(stdout(&first).contains("accuracy,100.000000"));
    assert!(stdout(&first).contains("folds,4"));
    let second = imts_in(dir.path(), &args, &[]);
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn the_output_dir_env_var_reroutes_pipeline_artifacts() {
    let dir = write_fixture_workspace();
    let via_env = dir.path().join("via_env");
    let output = imts_in(
        dir.path(),
        &["pipeline", "--config", "pipeline.json"],
        &[("IMTS_OUTPUT_DIR", via_env.to_str().unwrap())],
    );
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(via_env.join("report.csv").is_file());

    // The explicit flag beats the environment.
    let via_flag = dir.path().join("via_flag");
    let output = imts_in(
        dir.path(),
        &[
            "pipeline",
            "--config",
            "pipeline.json",
            "--output-dir",
            via_flag.to_str().unwrap(),
        ],
        &[("IMTS_OUTPUT_DIR", dir.path().join("ignored").to_str().unwrap())],
    );
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(via_flag.join("report.csv").is_file());
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn pipeline_reports_the_stage_that_halted() {
    let dir = write_fixture_workspace();
    let output = imts_in(
        dir.path(),
        &[
            "pipeline",
            "--config",
            "pipeline.json",
            "--policy",
            "strict",
            "--output-dir",
            "halted",
        ],
        &[],
    );
    assert_eq!(output.status.code(), Some(4));
    let err = stderr(&output);
    assert!(err.contains("pipeline halted at stage `train`"), "{err}");
    // Upstream artifacts exist; nothing downstream of the failure does.
    assert!(dir.path().join("halted/ranking.csv").is_file());
    assert!(!dir.path().join("halted/predictions.csv").exists());
}
