//! `imts evaluate`: score a labeled ranking matrix, either by stratified
//! cross-validation or against an imported prediction file.

use std::path::PathBuf;

use clap::Args;
use imts_core::aggregate::RankingScoreMatrix;
use imts_core::imts::InversionPolicy;
use imts_core::metrics::{kfold_evaluate, score_predictions, EvaluationReport};
use imts_core::{Error, Result};

use crate::config::OutputFormat;
use crate::formats::{read_predictions_csv, render_report};
use crate::out;

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Labeled ranking matrix CSV (as written by `imts aggregate`).
    #[arg(long)]
    pub ranking: PathBuf,
    /// Cross-validation fold count.
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Seed for the stratified shuffle.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Correlation-inversion policy: strict, pseudo_inverse, or ridge.
    #[arg(long, default_value = "pseudo_inverse")]
    pub policy: String,
    /// Ridge strength (used with --policy ridge).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Score this prediction CSV against the ranking labels instead of
    /// running cross-validation.
    #[arg(long)]
    pub import: Option<PathBuf>,
    /// Report rendering.
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
    /// Report output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Score an imported prediction file against the ranking's labels, joining
/// rows by alternative id.
fn evaluate_import(
    scores: &RankingScoreMatrix,
    text: &str,
    seed: u64,
) -> Result<EvaluationReport> {
    let imported = read_predictions_csv(text, &scores.class_names)?;
    let mut predicted = Vec::with_capacity(scores.n_rows());
    let mut probabilities = Vec::with_capacity(scores.n_rows());
    let mut with_probs = 0usize;
    for id in &scores.alternative_ids {
        let row = imported
            .iter()
            .find(|p| &p.id == id)
            .ok_or_else(|| Error::MissingPrediction { id: id.clone() })?;
        predicted.push(row.predicted.clone());
        if let Some(probs) = &row.probabilities {
            probabilities.push(probs.clone());
            with_probs += 1;
        }
    }
    let probabilities = match with_probs {
        0 => None,
        n if n == scores.n_rows() => Some(probabilities),
        _ => {
            return Err(Error::MalformedCsv {
                message: "probability columns must cover every row or none".into(),
            })
        }
    };
    score_predictions(
        &scores.class_names,
        &scores.labels,
        &predicted,
        probabilities.as_deref(),
        seed,
    )
}

pub fn run(args: &EvaluateArgs) -> Result<i32> {
    let text = out::read_to_string(&args.ranking)?;
    let scores = RankingScoreMatrix::from_csv_str(&text, "decision_class")
        .map_err(|e| e.in_file(&args.ranking))?;

    let report = match &args.import {
        Some(path) => {
            let predictions = out::read_to_string(path)?;
            evaluate_import(&scores, &predictions, args.seed).map_err(|e| e.in_file(path))?
        }
        None => {
            let policy = InversionPolicy::parse(&args.policy, args.epsilon)?;
            kfold_evaluate(&scores, args.folds, args.seed, policy)?
        }
    };

    out::print_or_write(args.out.as_deref(), &render_report(&report, args.format))?;
    if let Some(path) = &args.out {
        println!("wrote evaluation report -> {}", path.display());
    }
    Ok(0)
}
