//! `imts classify`: score feature rows against a set of class models and
//! emit per-class distances plus the least-distance prediction.

use std::path::{Path, PathBuf};

use clap::Args;
use imts_core::imts::{classify_rows, ClassModel};
use imts_core::{Error, Result};
use nalgebra::DMatrix;

use crate::formats::{predictions_csv, read_features_csv, FeatureTable};
use crate::out;

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Model JSON files or directories of them; repeatable. Directories
    /// expand to their `*.json` entries in name order.
    #[arg(long = "models", required = true)]
    pub models: Vec<PathBuf>,
    /// Feature rows to classify (a labeled ranking matrix also works; its
    /// label column is ignored).
    #[arg(long)]
    pub data: PathBuf,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Expand directories to their JSON entries, keeping explicit files as-is.
fn model_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let io_err = |source: std::io::Error| Error::Io {
                path: input.clone(),
                source,
            };
            let mut entries: Vec<PathBuf> = std::fs::read_dir(input)
                .map_err(io_err)?
                .collect::<std::io::Result<Vec<_>>>()
                .map_err(io_err)?
                .into_iter()
                .map(|entry| entry.path())
                .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
                .collect();
            entries.sort();
            paths.extend(entries);
        } else {
            paths.push(input.clone());
        }
    }
    if paths.is_empty() {
        return Err(Error::EmptyInput("no model files found".into()));
    }
    Ok(paths)
}

/// Reorder the table's feature columns to the models' feature order,
/// matching by column name.
fn align_features(table: &FeatureTable, feature_ids: &[String]) -> Result<DMatrix<f64>> {
    let mut column_of = Vec::with_capacity(feature_ids.len());
    for id in feature_ids {
        let idx = table
            .columns
            .iter()
            .position(|c| c == id)
            .ok_or_else(|| Error::MissingColumn { column: id.clone() })?;
        column_of.push(idx);
    }
    Ok(DMatrix::from_fn(
        table.rows.len(),
        feature_ids.len(),
        |i, j| table.rows[i][column_of[j]],
    ))
}

pub fn run(args: &ClassifyArgs) -> Result<i32> {
    let models = load_models(&args.models)?;
    let table = read_features_csv(&out::read_to_string(&args.data)?)
        .map_err(|e| e.in_file(&args.data))?;
    let rows = align_features(&table, &models[0].feature_ids)?;
    let results = classify_rows(&models, &table.ids, &rows)?;
    let class_names: Vec<String> = models.iter().map(|m| m.class_name.clone()).collect();
    out::print_or_write(args.out.as_deref(), &predictions_csv(&class_names, &results))?;

    let ties = results.iter().filter(|r| r.tie).count();
    if ties > 0 {
        eprintln!("note: {ties} row(s) tied; the first class in model order was kept");
    }
    if let Some(path) = &args.out {
        println!("classified {} rows -> {}", results.len(), path.display());
    }
    Ok(0)
}

/// Load every model file, in the given order.
pub fn load_models(inputs: &[PathBuf]) -> Result<Vec<ClassModel>> {
    model_paths(inputs)?
        .iter()
        .map(|path| ClassModel::load(Path::new(path)))
        .collect()
}
