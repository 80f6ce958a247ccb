//! Textual formats shared by the subcommands: weight tables, matrix dumps,
//! prediction files, and evaluation-report renderings.

use imts_core::grey::WeightVector;
use imts_core::imts::ClassificationResult;
use imts_core::metrics::EvaluationReport;
use imts_core::{fmt_fixed, Error, Result};
use nalgebra::DMatrix;

use crate::config::OutputFormat;

/// Fixed decimal places for every numeric CSV artifact.
pub const DECIMALS: usize = 6;

const WEIGHTS_HEADER: &str = "sub_factor_id,correlation_degree,weight";

/// Render weight vectors as per-main-factor sections: a
/// `# main_factor: <id>` comment line, the column header, then one row per
/// sub-factor.
pub fn weights_csv(sets: &[WeightVector]) -> String {
    if sets.is_empty() {
        return "# no sub-factor-bearing main factors in the hierarchy\n".to_string();
    }
    let mut text = String::new();
    for set in sets {
        text.push_str(&format!("# main_factor: {}\n{WEIGHTS_HEADER}\n", set.main_factor_id));
        for j in 0..set.sub_factor_ids.len() {
            text.push_str(&format!(
                "{},{},{}\n",
                set.sub_factor_ids[j],
                fmt_fixed(set.correlation_degrees[j], DECIMALS),
                fmt_fixed(set.weights[j], DECIMALS),
            ));
        }
    }
    text
}

/// Parse the format written by [`weights_csv`]. Several files can be
/// concatenated; each section must be introduced by its main-factor comment.
pub fn parse_weights_csv(text: &str) -> Result<Vec<WeightVector>> {
    let mut sets: Vec<WeightVector> = Vec::new();
    let mut current: Option<WeightVector> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        let row = idx + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(id) = comment.trim().strip_prefix("main_factor:") {
                if let Some(done) = current.take() {
                    sets.push(done);
                }
                current = Some(WeightVector {
                    main_factor_id: id.trim().to_string(),
                    sub_factor_ids: Vec::new(),
                    correlation_degrees: Vec::new(),
                    weights: Vec::new(),
                });
            }
            continue;
        }
        if line == WEIGHTS_HEADER {
            if current.is_none() {
                return Err(Error::MalformedCsv {
                    message: format!(
                        "line {row}: weight table without a preceding \
                         `# main_factor: <id>` line"
                    ),
                });
            }
            continue;
        }
        let set = current.as_mut().ok_or_else(|| Error::MalformedCsv {
            message: format!("line {row}: data before any `# main_factor: <id>` line"),
        })?;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::MalformedCsv {
                message: format!("line {row}: expected 3 fields, got {}", fields.len()),
            });
        }
        let parse = |field: &str, column: &str| -> Result<f64> {
            field.parse::<f64>().map_err(|_| Error::NonNumericCell {
                row,
                column: column.to_string(),
                value: field.to_string(),
            })
        };
        set.sub_factor_ids.push(fields[0].to_string());
        set.correlation_degrees
            .push(parse(fields[1], "correlation_degree")?);
        set.weights.push(parse(fields[2], "weight")?);
    }
    if let Some(done) = current.take() {
        sets.push(done);
    }
    if sets.is_empty() {
        return Err(Error::EmptyInput("no weight sections found".into()));
    }
    for set in &sets {
        if set.sub_factor_ids.is_empty() {
            return Err(Error::EmptyInput(format!(
                "weight section for `{}` has no rows",
                set.main_factor_id
            )));
        }
    }
    Ok(sets)
}

/// Render a labeled matrix (intermediate dumps) with fixed decimals.
pub fn matrix_csv(column_ids: &[String], row_ids: &[String], values: &DMatrix<f64>) -> String {
    let mut text = String::from("alternative_id,");
    text.push_str(&column_ids.join(","));
    text.push('\n');
    for i in 0..values.nrows() {
        text.push_str(&row_ids[i]);
        for j in 0..values.ncols() {
            text.push(',');
            text.push_str(&fmt_fixed(values[(i, j)], DECIMALS));
        }
        text.push('\n');
    }
    text
}

/// Feature rows read from a CSV that may or may not carry an
/// `alternative_id` column and a label column (ignored here).
#[derive(Debug)]
pub struct FeatureTable {
    pub ids: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Parse feature rows for classification. A `decision_class` column is
/// tolerated and skipped so labeled ranking files classify as-is.
pub fn read_features_csv(text: &str) -> Result<FeatureTable> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::MalformedCsv {
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.to_string())
        .collect();
    let id_index = headers.iter().position(|h| h == "alternative_id");
    let label_index = headers.iter().position(|h| h == "decision_class");
    let feature_indices: Vec<usize> = (0..headers.len())
        .filter(|&i| Some(i) != id_index && Some(i) != label_index)
        .collect();
    if feature_indices.is_empty() {
        return Err(Error::EmptyInput("no feature columns in header".into()));
    }
    let columns: Vec<String> = feature_indices
        .iter()
        .map(|&i| headers[i].clone())
        .collect();
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1;
        let record = record.map_err(|e| Error::MalformedCsv {
            message: e.to_string(),
        })?;
        ids.push(match id_index {
            Some(idx) => record[idx].to_string(),
            None => format!("row{row}"),
        });
        let mut values = Vec::with_capacity(feature_indices.len());
        for &idx in &feature_indices {
            let raw = &record[idx];
            let value: f64 = raw.parse().unwrap_or(f64::NAN);
            if !value.is_finite() {
                return Err(Error::NonNumericCell {
                    row,
                    column: headers[idx].clone(),
                    value: raw.to_string(),
                });
            }
            values.push(value);
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(FeatureTable { ids, columns, rows })
}

/// Render classification results: one distance column per class (in model
/// order), the winner, and the tie flag.
pub fn predictions_csv(class_names: &[String], results: &[ClassificationResult]) -> String {
    let mut text = String::from("alternative_id");
    for class in class_names {
        text.push_str(",md_");
        text.push_str(class);
    }
    text.push_str(",predicted,tie\n");
    for result in results {
        text.push_str(&result.alternative_id);
        for (_, distance) in &result.distances {
            text.push(',');
            text.push_str(&fmt_fixed(*distance, DECIMALS));
        }
        text.push(',');
        text.push_str(&result.predicted);
        text.push(',');
        text.push_str(if result.tie { "true" } else { "false" });
        text.push('\n');
    }
    text
}

/// One imported prediction row.
#[derive(Debug)]
pub struct ImportedPrediction {
    pub id: String,
    pub predicted: String,
    pub probabilities: Option<Vec<f64>>,
}

/// Parse an external predictions CSV: `alternative_id` and `predicted` are
/// required; `prob_<class>` columns (all classes or none) supply predicted
/// distributions; any other column is ignored, so `classify` output can be
/// fed back directly.
pub fn read_predictions_csv(
    text: &str,
    class_names: &[String],
) -> Result<Vec<ImportedPrediction>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::MalformedCsv {
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.to_string())
        .collect();
    let position = |name: &str| headers.iter().position(|h| h == name);
    let id_index = position("alternative_id").ok_or_else(|| Error::MissingColumn {
        column: "alternative_id".to_string(),
    })?;
    let predicted_index = position("predicted").ok_or_else(|| Error::MissingColumn {
        column: "predicted".to_string(),
    })?;
    let prob_indices: Vec<Option<usize>> = class_names
        .iter()
        .map(|class| position(&format!("prob_{class}")))
        .collect();
    let any_probs = prob_indices.iter().any(Option::is_some);
    let prob_indices: Option<Vec<usize>> = if any_probs {
        Some(
            class_names
                .iter()
                .zip(&prob_indices)
                .map(|(class, idx)| {
                    idx.ok_or_else(|| Error::MissingColumn {
                        column: format!("prob_{class}"),
                    })
                })
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };

    let mut predictions = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1;
        let record = record.map_err(|e| Error::MalformedCsv {
            message: e.to_string(),
        })?;
        let probabilities = match &prob_indices {
            None => None,
            Some(indices) => Some(
                indices
                    .iter()
                    .map(|&idx| {
                        let raw = &record[idx];
                        let value: f64 = raw.parse().unwrap_or(f64::NAN);
                        if value.is_finite() {
                            Ok(value)
                        } else {
                            Err(Error::NonNumericCell {
                                row,
                                column: headers[idx].clone(),
                                value: raw.to_string(),
                            })
                        }
                    })
                    .collect::<Result<Vec<f64>>>()?,
            ),
        };
        predictions.push(ImportedPrediction {
            id: record[id_index].to_string(),
            predicted: record[predicted_index].to_string(),
            probabilities,
        });
    }
    if predictions.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(predictions)
}

fn optional_rate(value: Option<f64>) -> String {
    match value {
        Some(v) => fmt_fixed(v, DECIMALS),
        // The baseline itself has zero error, so the ratio is undefined.
        None => "NA".to_string(),
    }
}

/// Render a report in the requested format. All renderings are
/// deterministic functions of the report contents.
pub fn render_report(report: &EvaluationReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => report.to_json_string(),
        OutputFormat::Csv => render_report_csv(report),
        OutputFormat::Table => render_report_table(report),
    }
}

fn render_report_csv(report: &EvaluationReport) -> String {
    let mut text = String::from("metric,value\n");
    let mut push = |name: &str, value: String| {
        text.push_str(name);
        text.push(',');
        text.push_str(&value);
        text.push('\n');
    };
    push("n_rows", report.n_rows.to_string());
    push("folds", report.folds.to_string());
    push("seed", report.seed.to_string());
    push("accuracy", fmt_fixed(report.scores.accuracy, DECIMALS));
    for (i, class) in report.class_names.iter().enumerate() {
        push(
            &format!("precision_{class}"),
            fmt_fixed(report.scores.precision_per_class[i], DECIMALS),
        );
    }
    for (i, class) in report.class_names.iter().enumerate() {
        push(
            &format!("recall_{class}"),
            fmt_fixed(report.scores.recall_per_class[i], DECIMALS),
        );
    }
    push(
        "precision_macro",
        fmt_fixed(report.scores.precision_macro, DECIMALS),
    );
    push(
        "recall_macro",
        fmt_fixed(report.scores.recall_macro, DECIMALS),
    );
    push(
        "precision_weighted",
        fmt_fixed(report.scores.precision_weighted, DECIMALS),
    );
    push(
        "recall_weighted",
        fmt_fixed(report.scores.recall_weighted, DECIMALS),
    );
    push("mae", fmt_fixed(report.error_rates.mae, DECIMALS));
    push("rmse", fmt_fixed(report.error_rates.rmse, DECIMALS));
    push("rae", optional_rate(report.error_rates.rae));
    push("rrse", optional_rate(report.error_rates.rrse));
    for warning in &report.warnings {
        text.push_str("# warning: ");
        text.push_str(warning);
        text.push('\n');
    }
    text
}

fn render_report_table(report: &EvaluationReport) -> String {
    let mut text = String::new();
    let mode = if report.folds == 0 {
        "scored predictions".to_string()
    } else {
        format!("{}-fold cross-validation (seed {})", report.folds, report.seed)
    };
    text.push_str(&format!(
        "evaluation over {} rows, {} classes — {mode}\n\n",
        report.n_rows,
        report.class_names.len()
    ));
    let width = report
        .class_names
        .iter()
        .map(|c| c.len())
        .max()
        .unwrap_or(5)
        .max("weighted".len());
    text.push_str(&format!(
        "{:<width$}  {:>10}  {:>10}\n",
        "class", "precision", "recall"
    ));
    for (i, class) in report.class_names.iter().enumerate() {
        text.push_str(&format!(
            "{:<width$}  {:>10}  {:>10}\n",
            class,
            fmt_fixed(report.scores.precision_per_class[i], 2),
            fmt_fixed(report.scores.recall_per_class[i], 2),
        ));
    }
    text.push_str(&format!(
        "{:<width$}  {:>10}  {:>10}\n",
        "macro",
        fmt_fixed(report.scores.precision_macro, 2),
        fmt_fixed(report.scores.recall_macro, 2),
    ));
    text.push_str(&format!(
        "{:<width$}  {:>10}  {:>10}\n\n",
        "weighted",
        fmt_fixed(report.scores.precision_weighted, 2),
        fmt_fixed(report.scores.recall_weighted, 2),
    ));
    text.push_str(&format!(
        "accuracy {} %\nMAE {} %   RMSE {} %   RAE {} %   RRSE {} %\n",
        fmt_fixed(report.scores.accuracy, 2),
        fmt_fixed(report.error_rates.mae, 2),
        fmt_fixed(report.error_rates.rmse, 2),
        match report.error_rates.rae {
            Some(v) => fmt_fixed(v, 2),
            None => "NA".to_string(),
        },
        match report.error_rates.rrse {
            Some(v) => fmt_fixed(v, 2),
            None => "NA".to_string(),
        },
    ));
    if !report.scores.zero_prediction_classes.is_empty() {
        text.push_str(&format!(
            "note: class(es) never predicted (precision reported as 0): {}\n",
            report.scores.zero_prediction_classes.join(", ")
        ));
    }
    for warning in &report.warnings {
        text.push_str(&format!("warning: {warning}\n"));
    }
    text
}
