//! Collapse sub-factor matrices into per-main-factor scores and assemble the
//! labeled ranking-score matrix used by the classifier.

use std::collections::{BTreeMap, HashSet};

use nalgebra::DMatrix;

use crate::dataset::{DecisionMatrix, LabeledDataset};
use crate::error::{Error, Result};
use crate::grey::WeightVector;

/// Labeled alternatives-by-main-factors score matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingScoreMatrix {
    pub main_factor_ids: Vec<String>,
    pub alternative_ids: Vec<String>,
    /// Class label of each row.
    pub labels: Vec<String>,
    /// Distinct classes in first-appearance order.
    pub class_names: Vec<String>,
    pub values: DMatrix<f64>,
}

impl RankingScoreMatrix {
    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_factors(&self) -> usize {
        self.values.ncols()
    }

    /// One row as a plain vector.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.values.row(i).iter().copied().collect()
    }

    /// Row indices belonging to one class, in row order.
    pub fn class_row_indices(&self, class: &str) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.as_str() == class)
            .map(|(i, _)| i)
            .collect()
    }

    /// The sub-matrix of rows belonging to one class.
    pub fn class_rows(&self, class: &str) -> DMatrix<f64> {
        let indices = self.class_row_indices(class);
        DMatrix::from_fn(indices.len(), self.n_factors(), |i, j| {
            self.values[(indices[i], j)]
        })
    }

    /// The sub-matrix of an arbitrary row selection, labels alongside.
    pub fn select_rows(&self, indices: &[usize]) -> (DMatrix<f64>, Vec<String>, Vec<String>) {
        let values = DMatrix::from_fn(indices.len(), self.n_factors(), |i, j| {
            self.values[(indices[i], j)]
        });
        let ids = indices
            .iter()
            .map(|&i| self.alternative_ids[i].clone())
            .collect();
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        (values, ids, labels)
    }

    /// Parse from CSV text: optional `alternative_id` column, one numeric
    /// column per factor, and a label column. Lines starting with `#` are
    /// comments.
    pub fn from_csv_str(text: &str, label_column: &str) -> Result<Self> {
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
        let label_index = headers
            .iter()
            .position(|h| h == label_column)
            .ok_or_else(|| Error::MissingColumn {
                column: label_column.to_string(),
            })?;
        let factor_indices: Vec<usize> = (0..headers.len())
            .filter(|&i| Some(i) != id_index && i != label_index)
            .collect();
        if factor_indices.is_empty() {
            return Err(Error::EmptyInput("no factor columns in header".into()));
        }
        let main_factor_ids: Vec<String> = factor_indices
            .iter()
            .map(|&i| headers[i].clone())
            .collect();

        let mut alternative_ids = Vec::new();
        let mut labels = Vec::new();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut seen: HashSet<String> = HashSet::new();
        for (row_idx, record) in reader.records().enumerate() {
            let row = row_idx + 1;
            let record = record.map_err(|e| Error::MalformedCsv {
                message: e.to_string(),
            })?;
            let id = match id_index {
                Some(idx) => record[idx].to_string(),
                None => format!("row{row}"),
            };
            if !seen.insert(id.clone()) {
                return Err(Error::DuplicateAlternative { row, id });
            }
            alternative_ids.push(id);
            labels.push(record[label_index].to_string());
            let mut values = Vec::with_capacity(factor_indices.len());
            for &idx in &factor_indices {
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
        let mut class_names: Vec<String> = Vec::new();
        for label in &labels {
            if !class_names.contains(label) {
                class_names.push(label.clone());
            }
        }
        let values = DMatrix::from_fn(rows.len(), factor_indices.len(), |i, j| rows[i][j]);
        Ok(RankingScoreMatrix {
            main_factor_ids,
            alternative_ids,
            labels,
            class_names,
            values,
        })
    }

    /// Serialize to CSV with a fixed number of decimals per value.
    pub fn to_csv_string(&self, decimals: usize) -> String {
        let mut out = String::new();
        out.push_str("alternative_id,");
        out.push_str(&self.main_factor_ids.join(","));
        out.push_str(",decision_class\n");
        for i in 0..self.n_rows() {
            out.push_str(&self.alternative_ids[i]);
            for j in 0..self.n_factors() {
                out.push(',');
                out.push_str(&crate::fmt_fixed(self.values[(i, j)], decimals));
            }
            out.push(',');
            out.push_str(&self.labels[i]);
            out.push('\n');
        }
        out
    }
}

/// Weighted sum of each row of the matrix: score_i = sum_j D_ij * w_j,
/// applied to the raw (un-normalized) decision values.
pub fn objective_scores(matrix: &DecisionMatrix, weights: &WeightVector) -> Result<Vec<f64>> {
    if weights.main_factor_id != matrix.main_factor_id {
        return Err(Error::FactorMismatch {
            weights: weights.main_factor_id.clone(),
            matrix: matrix.main_factor_id.clone(),
        });
    }
    if weights.weights.len() != matrix.ncols() {
        return Err(Error::DimensionMismatch {
            context: format!("objective scores for `{}`", matrix.main_factor_id),
            expected: matrix.ncols(),
            actual: weights.weights.len(),
        });
    }
    Ok((0..matrix.nrows())
        .map(|i| {
            matrix
                .values
                .row(i)
                .iter()
                .zip(&weights.weights)
                .map(|(d, w)| d * w)
                .sum()
        })
        .collect())
}

/// Assemble the ranking matrix: objective scores for factors with sub-factor
/// matrices, raw values (optionally scaled) for passthrough factors. Columns
/// follow hierarchy order.
pub fn build_ranking_matrix(
    dataset: &LabeledDataset,
    weight_sets: &BTreeMap<String, WeightVector>,
    passthrough_scale: &BTreeMap<String, f64>,
) -> Result<RankingScoreMatrix> {
    for (id, &scale) in passthrough_scale {
        let mf = dataset
            .hierarchy
            .main_factor(id)
            .ok_or_else(|| Error::UnknownMainFactor { id: id.clone() })?;
        if !mf.passthrough {
            return Err(Error::ScaleNotPassthrough { id: id.clone() });
        }
        if scale <= 0.0 || !scale.is_finite() {
            return Err(Error::InvalidScale {
                id: id.clone(),
                value: scale,
            });
        }
    }

    let m = dataset.n_rows();
    let mut main_factor_ids = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for mf in &dataset.hierarchy.main_factors {
        let column = if mf.passthrough {
            let scale = passthrough_scale.get(&mf.id).copied().unwrap_or(1.0);
            dataset.passthrough_columns[&mf.id]
                .iter()
                .map(|v| v * scale)
                .collect()
        } else {
            let weights = weight_sets
                .get(&mf.id)
                .ok_or_else(|| Error::MissingWeights { id: mf.id.clone() })?;
            objective_scores(&dataset.matrices[&mf.id], weights)?
        };
        main_factor_ids.push(mf.id.clone());
        columns.push(column);
    }

    let values = DMatrix::from_fn(m, columns.len(), |i, j| columns[j][i]);
    Ok(RankingScoreMatrix {
        main_factor_ids,
        alternative_ids: dataset.alternative_ids.clone(),
        labels: dataset.labels.clone(),
        class_names: dataset.class_names.clone(),
        values,
    })
}
