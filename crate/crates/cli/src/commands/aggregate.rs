//! `imts aggregate`: collapse each weighted main factor to its objective
//! score and emit the labeled ranking matrix.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use imts_core::dataset::load_dataset;
use imts_core::aggregate::build_ranking_matrix;
use imts_core::{Error, Result};

use crate::config::parse_scale;
use crate::formats::{parse_weights_csv, DECIMALS};
use crate::out;

#[derive(Debug, Args)]
pub struct AggregateArgs {
    /// Dataset CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Factor hierarchy JSON.
    #[arg(long)]
    pub hierarchy: PathBuf,
    /// Weight file(s) as written by `imts weights`; repeatable.
    #[arg(long = "weights", required = true)]
    pub weights: Vec<PathBuf>,
    /// Passthrough scale, `<main_factor>=<value>`; repeatable.
    #[arg(long = "scale", value_parser = parse_scale)]
    pub scale: Vec<(String, f64)>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &AggregateArgs) -> Result<i32> {
    let dataset = load_dataset(&args.data, &args.hierarchy)?;

    let mut weight_sets = BTreeMap::new();
    for path in &args.weights {
        let text = out::read_to_string(path)?;
        for set in parse_weights_csv(&text).map_err(|e| e.in_file(path))? {
            if weight_sets
                .insert(set.main_factor_id.clone(), set.clone())
                .is_some()
            {
                return Err(Error::InvalidConfig {
                    message: format!(
                        "main factor `{}` appears in more than one weight file",
                        set.main_factor_id
                    ),
                });
            }
        }
    }

    let passthrough_scale: BTreeMap<String, f64> = args.scale.iter().cloned().collect();
    let scores = build_ranking_matrix(&dataset, &weight_sets, &passthrough_scale)?;
    out::print_or_write(args.out.as_deref(), &scores.to_csv_string(DECIMALS))?;
    if let Some(path) = &args.out {
        println!(
            "wrote {} rows x {} factors -> {}",
            scores.n_rows(),
            scores.n_factors(),
            path.display()
        );
    }
    Ok(0)
}
