//! `imts weights`: derive sub-factor weights for every non-passthrough main
//! factor of a dataset.

use std::path::PathBuf;

use clap::Args;
use imts_core::dataset::{load_dataset, slice_main_factor};
use imts_core::grey::{grey_analysis, GreyConfig};
use imts_core::{fmt_fixed, Result};

use crate::config::ColumnPolicy;
use crate::formats::{matrix_csv, weights_csv, DECIMALS};
use crate::out;

#[derive(Debug, Args)]
pub struct WeightsArgs {
    /// Dataset CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Factor hierarchy JSON.
    #[arg(long)]
    pub hierarchy: PathBuf,
    /// Distinguishing threshold in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// How to treat constant columns during normalization.
    #[arg(long, value_enum, default_value_t = ColumnPolicy::Error)]
    pub constant_columns: ColumnPolicy,
    /// Directory for the weight files.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Also write the comparability, relational-degree, and coefficient
    /// matrices next to each weight file.
    #[arg(long)]
    pub dump_intermediates: bool,
}

pub fn run(args: &WeightsArgs) -> Result<i32> {
    let config = GreyConfig {
        threshold: args.threshold,
        constant_column_policy: args.constant_columns.into(),
    };
    config.validate()?;
    let dataset = load_dataset(&args.data, &args.hierarchy)?;

    let factors: Vec<&str> = dataset
        .hierarchy
        .non_passthrough()
        .map(|mf| mf.id.as_str())
        .collect();
    if factors.is_empty() {
        println!("no sub-factor-bearing main factors in the hierarchy; nothing to weight");
        return Ok(0);
    }

    for id in factors {
        let matrix = slice_main_factor(&dataset, id)?;
        let analysis = grey_analysis(&matrix, &config)?;
        let safe = out::sanitize(id);

        let path = args.out.join(format!("weights_{safe}.csv"));
        out::write_atomic(&path, &weights_csv(std::slice::from_ref(&analysis.weights)))?;
        println!(
            "{id}: {} sub-factors, delta range [{}, {}] -> {}",
            matrix.ncols(),
            fmt_fixed(analysis.coefficients.delta_min, DECIMALS),
            fmt_fixed(analysis.coefficients.delta_max, DECIMALS),
            path.display()
        );
        if analysis.coefficients.degenerate {
            println!(
                "note: {id} has zero delta spread; uniform weights were assigned"
            );
        }

        if args.dump_intermediates {
            for (stem, columns, rows, values) in [
                (
                    "comparability",
                    &analysis.comparability.sub_factor_ids,
                    &analysis.comparability.alternative_ids,
                    &analysis.comparability.values,
                ),
                (
                    "relational",
                    &analysis.relational.sub_factor_ids,
                    &analysis.relational.alternative_ids,
                    &analysis.relational.values,
                ),
                (
                    "coefficients",
                    &analysis.coefficients.sub_factor_ids,
                    &analysis.coefficients.alternative_ids,
                    &analysis.coefficients.values,
                ),
            ] {
                let path = args.out.join(format!("{stem}_{safe}.csv"));
                out::write_atomic(&path, &matrix_csv(columns, rows, values))?;
            }
        }
    }
    Ok(0)
}
