//! Labeled datasets organized by a two-level factor hierarchy.
//!
//! A dataset is a CSV of numeric columns plus a label column; a hierarchy JSON
//! document groups those columns into main factors, each either carrying a
//! list of sub-factor columns or acting as a passthrough column of its own.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A leaf criterion: one numeric column of the dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubFactor {
    pub id: String,
    pub name: String,
}

/// A top-level criterion grouping sub-factors, or a passthrough column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MainFactor {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub passthrough: bool,
    #[serde(default)]
    pub sub_factors: Vec<SubFactor>,
}

/// Ordered two-level tree of main factors and their sub-factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorHierarchy {
    pub main_factors: Vec<MainFactor>,
}

impl FactorHierarchy {
    /// Parse and structurally validate a hierarchy from JSON text.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let hierarchy: FactorHierarchy =
            serde_json::from_str(text).map_err(|e| Error::MalformedJson {
                message: e.to_string(),
            })?;
        hierarchy.validate_structure()?;
        Ok(hierarchy)
    }

    /// Load a hierarchy from a JSON file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text).map_err(|e| e.in_file(path))
    }

    /// Check the structural invariants: at least one main factor, globally
    /// unique non-empty ids, and passthrough exactly when sub-factors are absent.
    pub fn validate_structure(&self) -> Result<()> {
        let fail = |message: String| Err(Error::InvalidHierarchy { message });
        if self.main_factors.is_empty() {
            return fail("at least one main factor is required".into());
        }
        let mut seen: HashSet<&str> = HashSet::new();
        for mf in &self.main_factors {
            if mf.id.is_empty() {
                return fail("main factor with empty id".into());
            }
            if !seen.insert(&mf.id) {
                return fail(format!("duplicate id `{}`", mf.id));
            }
            if mf.passthrough && !mf.sub_factors.is_empty() {
                return fail(format!(
                    "main factor `{}` is passthrough but lists sub-factors",
                    mf.id
                ));
            }
            if !mf.passthrough && mf.sub_factors.is_empty() {
                return fail(format!(
                    "main factor `{}` is not passthrough but has no sub-factors",
                    mf.id
                ));
            }
            for sf in &mf.sub_factors {
                if sf.id.is_empty() {
                    return fail(format!("main factor `{}` has a sub-factor with empty id", mf.id));
                }
                if !seen.insert(&sf.id) {
                    return fail(format!("duplicate id `{}`", sf.id));
                }
            }
        }
        Ok(())
    }

    /// Look up a main factor by id.
    pub fn main_factor(&self, id: &str) -> Option<&MainFactor> {
        self.main_factors.iter().find(|mf| mf.id == id)
    }

    /// Main factors that carry a sub-factor matrix, in hierarchy order.
    pub fn non_passthrough(&self) -> impl Iterator<Item = &MainFactor> {
        self.main_factors.iter().filter(|mf| !mf.passthrough)
    }

    /// Every data column the hierarchy expects, in hierarchy order:
    /// the sub-factor ids of each main factor, or the factor id itself when
    /// passthrough.
    pub fn data_column_ids(&self) -> Vec<&str> {
        let mut ids = Vec::new();
        for mf in &self.main_factors {
            if mf.passthrough {
                ids.push(mf.id.as_str());
            } else {
                ids.extend(mf.sub_factors.iter().map(|sf| sf.id.as_str()));
            }
        }
        ids
    }
}

/// An alternatives-by-sub-factors numeric matrix for one main factor.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionMatrix {
    pub main_factor_id: String,
    pub sub_factor_ids: Vec<String>,
    pub alternative_ids: Vec<String>,
    /// Row i holds alternative `alternative_ids[i]`; column j holds
    /// sub-factor `sub_factor_ids[j]`.
    pub values: DMatrix<f64>,
}

impl DecisionMatrix {
    /// Build a matrix from rows, enforcing the shape and finiteness invariants.
    pub fn from_rows(
        main_factor_id: impl Into<String>,
        sub_factor_ids: Vec<String>,
        alternative_ids: Vec<String>,
        rows: &[Vec<f64>],
    ) -> Result<Self> {
        let main_factor_id = main_factor_id.into();
        let invalid = |message: String| Error::InvalidMatrix {
            main_factor_id: main_factor_id.clone(),
            message,
        };
        let m = rows.len();
        let n = sub_factor_ids.len();
        if m < 2 {
            return Err(invalid(format!("needs at least 2 rows, got {m}")));
        }
        if n == 0 {
            return Err(invalid("needs at least 1 column".into()));
        }
        if alternative_ids.len() != m {
            return Err(invalid(format!(
                "{} alternative ids for {m} rows",
                alternative_ids.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(invalid(format!(
                    "row {} has {} values, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(invalid(format!(
                    "non-finite value at row {}, column `{}`",
                    i + 1,
                    sub_factor_ids[j]
                )));
            }
        }
        let values = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
        Ok(DecisionMatrix {
            main_factor_id,
            sub_factor_ids,
            alternative_ids,
            values,
        })
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    /// One column as a plain vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.column(j).iter().copied().collect()
    }

    /// One row as a plain vector.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.values.row(i).iter().copied().collect()
    }
}

/// A full dataset: hierarchy, per-factor matrices, passthrough columns, labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub hierarchy: FactorHierarchy,
    /// One matrix per non-passthrough main factor, keyed by factor id.
    pub matrices: BTreeMap<String, DecisionMatrix>,
    /// Raw column per passthrough main factor, keyed by factor id.
    pub passthrough_columns: BTreeMap<String, Vec<f64>>,
    pub alternative_ids: Vec<String>,
    /// Class label of each row, aligned with `alternative_ids`.
    pub labels: Vec<String>,
    /// Distinct classes in first-appearance order; downstream tie-breaking
    /// follows this order.
    pub class_names: Vec<String>,
}

impl LabeledDataset {
    pub fn n_rows(&self) -> usize {
        self.alternative_ids.len()
    }

    /// Row indices belonging to one class, in row order.
    pub fn class_rows(&self, class: &str) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.as_str() == class)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Column-name conventions used when reading a dataset CSV.
#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Name of the label column.
    pub label_column: String,
    /// Name of the alternative-id column; when the header lacks it, ids
    /// `row1`, `row2`, ... are synthesized.
    pub id_column: String,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            label_column: "decision_class".into(),
            id_column: "alternative_id".into(),
        }
    }
}

/// Severity of a validation violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Warning => write!(f, "warning"),
            Severity::Error => write!(f, "error"),
        }
    }
}

/// One finding from [`validate`], with a machine-readable code and location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: &'static str,
    pub severity: Severity,
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{}] {}: {}",
            self.severity, self.code, self.location, self.message
        )
    }
}

/// Load and validate a dataset from a CSV file and a hierarchy JSON file,
/// using the default column conventions.
pub fn load_dataset(data_path: &Path, hierarchy_path: &Path) -> Result<LabeledDataset> {
    load_dataset_with(data_path, hierarchy_path, &LoadOptions::default())
}

/// Load a dataset with explicit column conventions.
pub fn load_dataset_with(
    data_path: &Path,
    hierarchy_path: &Path,
    options: &LoadOptions,
) -> Result<LabeledDataset> {
    let hierarchy = FactorHierarchy::from_path(hierarchy_path)?;
    let text = std::fs::read_to_string(data_path).map_err(|source| Error::Io {
        path: data_path.to_path_buf(),
        source,
    })?;
    parse_dataset_csv(&text, hierarchy, options).map_err(|e| e.in_file(data_path))
}

/// Parse a dataset from CSV text against an already-validated hierarchy.
///
/// Lines starting with `#` are treated as comments. Column-to-factor binding
/// follows hierarchy order regardless of the CSV column order.
pub fn parse_dataset_csv(
    text: &str,
    hierarchy: FactorHierarchy,
    options: &LoadOptions,
) -> Result<LabeledDataset> {
    hierarchy.validate_structure()?;
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

    let expected: Vec<&str> = hierarchy.data_column_ids();
    let mut header_index: BTreeMap<&str, usize> = BTreeMap::new();
    for (idx, h) in headers.iter().enumerate() {
        header_index.insert(h.as_str(), idx);
    }
    let id_index = header_index.get(options.id_column.as_str()).copied();
    let label_index = *header_index
        .get(options.label_column.as_str())
        .ok_or_else(|| Error::MissingColumn {
            column: options.label_column.clone(),
        })?;
    for column in &expected {
        if !header_index.contains_key(column) {
            return Err(Error::MissingColumn {
                column: (*column).to_string(),
            });
        }
    }
    for h in &headers {
        let known = h == &options.id_column
            || h == &options.label_column
            || expected.contains(&h.as_str());
        if !known {
            return Err(Error::UnknownColumn { column: h.clone() });
        }
    }

    let mut alternative_ids: Vec<String> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut columns: BTreeMap<String, Vec<f64>> = expected
        .iter()
        .map(|c| (c.to_string(), Vec::new()))
        .collect();
    let mut seen_ids: HashSet<String> = HashSet::new();

    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1;
        let record = record.map_err(|e| Error::MalformedCsv {
            message: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(Error::MalformedCsv {
                message: format!(
                    "row {row}: {} fields, header has {}",
                    record.len(),
                    headers.len()
                ),
            });
        }
        let id = match id_index {
            Some(idx) => record[idx].to_string(),
            None => format!("row{row}"),
        };
        if !seen_ids.insert(id.clone()) {
            return Err(Error::DuplicateAlternative { row, id });
        }
        alternative_ids.push(id);
        labels.push(record[label_index].to_string());
        for column in &expected {
            let idx = header_index[column];
            let raw = &record[idx];
            let value: f64 = raw.parse().unwrap_or(f64::NAN);
            if !value.is_finite() {
                return Err(Error::NonNumericCell {
                    row,
                    column: (*column).to_string(),
                    value: raw.to_string(),
                });
            }
            columns.get_mut(*column).expect("column preallocated").push(value);
        }
    }

    if alternative_ids.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut class_names: Vec<String> = Vec::new();
    for label in &labels {
        if !class_names.contains(label) {
            class_names.push(label.clone());
        }
    }

    let mut matrices = BTreeMap::new();
    let mut passthrough_columns = BTreeMap::new();
    for mf in &hierarchy.main_factors {
        if mf.passthrough {
            passthrough_columns.insert(mf.id.clone(), columns[&mf.id].clone());
        } else {
            let sub_ids: Vec<String> = mf.sub_factors.iter().map(|sf| sf.id.clone()).collect();
            let rows: Vec<Vec<f64>> = (0..alternative_ids.len())
                .map(|i| sub_ids.iter().map(|sid| columns[sid][i]).collect())
                .collect();
            let matrix = DecisionMatrix::from_rows(
                mf.id.clone(),
                sub_ids,
                alternative_ids.clone(),
                &rows,
            )?;
            matrices.insert(mf.id.clone(), matrix);
        }
    }

    Ok(LabeledDataset {
        hierarchy,
        matrices,
        passthrough_columns,
        alternative_ids,
        labels,
        class_names,
    })
}

/// Serialize a dataset back to CSV text: id column, data columns in hierarchy
/// order, then the label column. Numbers use the shortest representation that
/// parses back to the same value, so `parse_dataset_csv` inverts this exactly.
pub fn dataset_to_csv_string(dataset: &LabeledDataset) -> String {
    let mut out = String::new();
    let columns = dataset.hierarchy.data_column_ids();
    out.push_str("alternative_id,");
    out.push_str(&columns.join(","));
    out.push_str(",decision_class\n");
    for i in 0..dataset.n_rows() {
        out.push_str(&dataset.alternative_ids[i]);
        for column in &columns {
            let value = match dataset.passthrough_columns.get(*column) {
                Some(col) => col[i],
                None => {
                    let (factor, j) = locate_sub_factor(dataset, column);
                    dataset.matrices[factor].values[(i, j)]
                }
            };
            out.push(',');
            out.push_str(&format!("{value}"));
        }
        out.push(',');
        out.push_str(&dataset.labels[i]);
        out.push('\n');
    }
    out
}

/// Write a dataset as CSV to a file; see [`dataset_to_csv_string`].
pub fn write_dataset(dataset: &LabeledDataset, path: &Path) -> Result<()> {
    std::fs::write(path, dataset_to_csv_string(dataset)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn locate_sub_factor<'a>(dataset: &'a LabeledDataset, sub_id: &str) -> (&'a str, usize) {
    for mf in dataset.hierarchy.non_passthrough() {
        let matrix = &dataset.matrices[&mf.id];
        if let Some(j) = matrix.sub_factor_ids.iter().position(|s| s == sub_id) {
            return (mf.id.as_str(), j);
        }
    }
    unreachable!("sub-factor `{sub_id}` not present in any matrix")
}

/// Check every type invariant and report violations rather than failing.
pub fn validate(dataset: &LabeledDataset) -> Vec<Violation> {
    let mut violations = Vec::new();

    for class in &dataset.class_names {
        let count = dataset.labels.iter().filter(|l| l.as_str() == class).count();
        if count < 2 {
            violations.push(Violation {
                code: "CLASS_TOO_SMALL",
                severity: Severity::Error,
                location: format!("class `{class}`"),
                message: format!(
                    "{count} row(s); the per-class standard deviation needs at least 2"
                ),
            });
        }
    }

    let constant = |values: &[f64]| -> bool {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        lo == hi
    };
    for mf in dataset.hierarchy.non_passthrough() {
        let matrix = &dataset.matrices[&mf.id];
        for (j, sub_id) in matrix.sub_factor_ids.iter().enumerate() {
            if constant(&matrix.column(j)) {
                violations.push(Violation {
                    code: "CONSTANT_COLUMN",
                    severity: Severity::Warning,
                    location: format!("{}/{}", mf.id, sub_id),
                    message: "column is constant; it cannot be min-max normalized".into(),
                });
            }
        }
    }
    for (id, column) in &dataset.passthrough_columns {
        if constant(column) {
            violations.push(Violation {
                code: "CONSTANT_COLUMN",
                severity: Severity::Warning,
                location: id.clone(),
                message: "passthrough column is constant".into(),
            });
        }
    }

    let all_finite = dataset
        .matrices
        .values()
        .all(|m| m.values.iter().all(|v| v.is_finite()))
        && dataset
            .passthrough_columns
            .values()
            .all(|c| c.iter().all(|v| v.is_finite()));
    if !all_finite {
        violations.push(Violation {
            code: "NON_FINITE",
            severity: Severity::Error,
            location: "dataset".into(),
            message: "a value is NaN or infinite".into(),
        });
    }

    violations
}

/// Extract one main factor's matrix by value.
pub fn slice_main_factor(dataset: &LabeledDataset, main_factor_id: &str) -> Result<DecisionMatrix> {
    let mf = dataset
        .hierarchy
        .main_factor(main_factor_id)
        .ok_or_else(|| Error::UnknownMainFactor {
            id: main_factor_id.to_string(),
        })?;
    if mf.passthrough {
        return Err(Error::PassthroughSlice {
            id: main_factor_id.to_string(),
        });
    }
    Ok(dataset.matrices[main_factor_id].clone())
}
