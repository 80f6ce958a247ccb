//! `imts pipeline`: run the whole chain from a config file and write every
//! stage artifact into one output directory.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use imts_core::aggregate::build_ranking_matrix;
use imts_core::dataset::{load_dataset, slice_main_factor, validate, Severity};
use imts_core::grey::{grey_weights, WeightVector};
use imts_core::imts::{classify_rows, fit_all_classes};
use imts_core::metrics::score_predictions;
use imts_core::{fmt_fixed, Error, Result};

use crate::config::{ConfigOverrides, PipelineConfig};
use crate::formats::{predictions_csv, render_report, weights_csv, DECIMALS};
use crate::out;

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Pipeline config JSON.
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub overrides: ConfigOverrides,
}

/// Tag a stage's failure so the operator can see where the chain halted.
fn stage<T>(name: &str, result: Result<T>) -> Result<T> {
    if result.is_err() {
        eprintln!("pipeline halted at stage `{name}`");
    }
    result
}

pub fn run(args: &PipelineArgs) -> Result<i32> {
    let mut config = PipelineConfig::load(&args.config)?;
    config.apply_overrides(&args.overrides);
    config.validate()?;
    let out_dir = config.output_dir.clone();

    let dataset = stage(
        "load",
        load_dataset(&config.dataset_path, &config.hierarchy_path),
    )?;
    let violations = validate(&dataset);
    for v in &violations {
        eprintln!("{v}");
    }
    if violations.iter().any(|v| v.severity == Severity::Error) {
        let report = violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("\n");
        return stage("load", Err(Error::ValidationFailed { report }));
    }

    let grey = config.grey_config();
    let mut ordered: Vec<WeightVector> = Vec::new();
    let mut weight_sets = BTreeMap::new();
    for mf in dataset.hierarchy.non_passthrough() {
        let weights = stage(
            "weights",
            slice_main_factor(&dataset, &mf.id).and_then(|m| grey_weights(&m, &grey)),
        )?;
        weight_sets.insert(mf.id.clone(), weights.clone());
        ordered.push(weights);
    }
    stage(
        "weights",
        out::write_atomic(&out_dir.join("weights.csv"), &weights_csv(&ordered)),
    )?;

    let scores = stage(
        "aggregate",
        build_ranking_matrix(&dataset, &weight_sets, &config.passthrough_scale),
    )?;
    stage(
        "aggregate",
        out::write_atomic(&out_dir.join("ranking.csv"), &scores.to_csv_string(DECIMALS)),
    )?;

    let policy = config.policy()?;
    let models = stage("train", fit_all_classes(&scores, policy))?;
    for (i, model) in models.iter().enumerate() {
        let path = out_dir
            .join("models")
            .join(format!("{:02}_{}.json", i, out::sanitize(&model.class_name)));
        stage("train", out::write_atomic(&path, &model.to_json_string()))?;
    }

    let results = stage(
        "classify",
        classify_rows(&models, &scores.alternative_ids, &scores.values),
    )?;
    let class_names: Vec<String> = models.iter().map(|m| m.class_name.clone()).collect();
    stage(
        "classify",
        out::write_atomic(
            &out_dir.join("predictions.csv"),
            &predictions_csv(&class_names, &results),
        ),
    )?;

    // Resubstitution scoring: the published end-to-end protocol evaluates
    // the model on its own training rows.
    let predicted: Vec<String> = results.iter().map(|r| r.predicted.clone()).collect();
    let report = stage(
        "evaluate",
        score_predictions(
            &scores.class_names,
            &scores.labels,
            &predicted,
            None,
            config.seed,
        ),
    )?;
    let report_path = out_dir.join(format!("report.{}", config.format.extension()));
    stage(
        "evaluate",
        out::write_atomic(&report_path, &render_report(&report, config.format)),
    )?;

    println!(
        "pipeline complete: {} rows, {} classes, accuracy {} % -> {}",
        scores.n_rows(),
        scores.class_names.len(),
        fmt_fixed(report.scores.accuracy, 2),
        out_dir.display()
    );
    Ok(0)
}
