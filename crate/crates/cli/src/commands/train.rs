//! `imts train`: fit one distance model per class from a labeled ranking
//! matrix and write each model as JSON.

use std::path::PathBuf;

use clap::Args;
use imts_core::aggregate::RankingScoreMatrix;
use imts_core::imts::{fit_all_classes, InversionPolicy};
use imts_core::Result;

use crate::out;

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labeled ranking matrix CSV (as written by `imts aggregate`).
    #[arg(long)]
    pub ranking: PathBuf,
    /// Correlation-inversion policy: strict, pseudo_inverse, or ridge.
    #[arg(long, default_value = "pseudo_inverse")]
    pub policy: String,
    /// Ridge strength (used with --policy ridge).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Directory for the model files.
    #[arg(long, default_value = "models")]
    pub out_dir: PathBuf,
}

pub fn run(args: &TrainArgs) -> Result<i32> {
    let policy = InversionPolicy::parse(&args.policy, args.epsilon)?;
    let text = out::read_to_string(&args.ranking)?;
    let scores =
        RankingScoreMatrix::from_csv_str(&text, "decision_class").map_err(|e| e.in_file(&args.ranking))?;
    let models = fit_all_classes(&scores, policy)?;

    for (i, model) in models.iter().enumerate() {
        let path = args
            .out_dir
            .join(format!("{:02}_{}.json", i, out::sanitize(&model.class_name)));
        out::write_atomic(&path, &model.to_json_string())?;
        let condition = match model.inversion.condition {
            Some(c) => format!("{c:.3e}"),
            None => "unbounded".to_string(),
        };
        println!(
            "{}: n_train {}, rank {}/{}, condition {condition} -> {}",
            model.class_name,
            model.n_train,
            model.inversion.rank,
            model.k(),
            path.display()
        );
    }
    Ok(0)
}
