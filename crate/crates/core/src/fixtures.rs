//! Reference fixtures compiled into the library.
//!
//! These are the published tables the test suite and the `reproduce`
//! subcommand check against. Each CSV asset carries a provenance header
//! comment; the loaders here parse them into the crate's own types.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::aggregate::{build_ranking_matrix, RankingScoreMatrix};
use crate::dataset::{parse_dataset_csv, FactorHierarchy, LabeledDataset, LoadOptions};

/// Soil sub-factor comparability sequences for five candidate sites.
pub const TABLE1_CSV: &str = include_str!("../fixtures/table1.csv");
/// Hierarchy for [`TABLE1_CSV`]: one main factor over eleven sub-factors.
pub const TABLE1_HIERARCHY_JSON: &str = include_str!("../fixtures/table1_hierarchy.json");
/// Grey relational coefficients of the soil sub-factors at threshold 0.5.
pub const TABLE4_CSV: &str = include_str!("../fixtures/table4.csv");
/// Published sub-factor weights under the soil main factor.
pub const TABLE5_MF1_CSV: &str = include_str!("../fixtures/table5_mf1.csv");
/// Final ranking scores: 15 sites × 6 main factors, labeled by crop.
pub const TABLE6_CSV: &str = include_str!("../fixtures/table6.csv");
/// Hierarchy for [`TABLE6_CSV`]: six passthrough main factors.
pub const TABLE6_HIERARCHY_JSON: &str = include_str!("../fixtures/table6_hierarchy.json");
/// Published per-class test distances for each of the 15 sites.
pub const TABLE7_CSV: &str = include_str!("../fixtures/table7.csv");
/// Ready-to-run pipeline configuration over the bundled ranking dataset.
pub const PIPELINE_CONFIG_JSON: &str = include_str!("../fixtures/pipeline.json");

/// Published reference distances: one row per site, one column per class.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceDistances {
    pub site_ids: Vec<String>,
    pub class_names: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl ReferenceDistances {
    /// Index of the smallest distance in a row (first one on exact ties).
    pub fn argmin(row: &[f64]) -> usize {
        row.iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.partial_cmp(b).expect("reference values are finite"))
            .map(|(i, _)| i)
            .expect("reference rows are non-empty")
    }
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

/// The five-site soil dataset with its single-main-factor hierarchy.
pub fn table1_dataset() -> LabeledDataset {
    let hierarchy =
        FactorHierarchy::from_json_str(TABLE1_HIERARCHY_JSON).expect("bundled hierarchy parses");
    parse_dataset_csv(TABLE1_CSV, hierarchy, &LoadOptions::default())
        .expect("bundled dataset parses")
}

/// The published soil relational-coefficient matrix (5 sites × 11
/// sub-factors) with its column ids.
pub fn table4_matrix() -> (Vec<String>, DMatrix<f64>) {
    let mut reader = csv_reader(TABLE4_CSV);
    let ids: Vec<String> = reader
        .headers()
        .expect("bundled csv has headers")
        .iter()
        .map(|h| h.to_string())
        .collect();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.expect("bundled csv is well-formed");
        rows.push(
            record
                .iter()
                .map(|cell| cell.parse::<f64>().expect("bundled csv is numeric"))
                .collect(),
        );
    }
    let values = DMatrix::from_fn(rows.len(), ids.len(), |i, j| rows[i][j]);
    (ids, values)
}

/// The published soil sub-factor weights as `(sub_factor_id, weight)` pairs.
pub fn table5_mf1_weights() -> Vec<(String, f64)> {
    let mut reader = csv_reader(TABLE5_MF1_CSV);
    reader
        .records()
        .map(|record| {
            let record = record.expect("bundled csv is well-formed");
            (
                record[0].to_string(),
                record[1].parse::<f64>().expect("bundled csv is numeric"),
            )
        })
        .collect()
}

/// The 15-site labeled ranking dataset with its passthrough hierarchy.
pub fn table6_dataset() -> LabeledDataset {
    let hierarchy =
        FactorHierarchy::from_json_str(TABLE6_HIERARCHY_JSON).expect("bundled hierarchy parses");
    parse_dataset_csv(TABLE6_CSV, hierarchy, &LoadOptions::default())
        .expect("bundled dataset parses")
}

/// [`table6_dataset`] assembled into the ranking matrix the classifier
/// consumes (all factors are passthrough, so values are copied as-is).
pub fn table6_scores() -> RankingScoreMatrix {
    build_ranking_matrix(&table6_dataset(), &BTreeMap::new(), &BTreeMap::new())
        .expect("bundled dataset assembles")
}

/// The published per-class distances for all 15 sites.
pub fn table7_reference() -> ReferenceDistances {
    let mut reader = csv_reader(TABLE7_CSV);
    let class_names: Vec<String> = reader
        .headers()
        .expect("bundled csv has headers")
        .iter()
        .skip(1)
        .map(|h| {
            h.strip_prefix("md_")
                .expect("distance columns are md_<class>")
                .to_string()
        })
        .collect();
    let mut site_ids = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.expect("bundled csv is well-formed");
        site_ids.push(record[0].to_string());
        values.push(
            record
                .iter()
                .skip(1)
                .map(|cell| cell.parse::<f64>().expect("bundled csv is numeric"))
                .collect(),
        );
    }
    ReferenceDistances {
        site_ids,
        class_names,
        values,
    }
}
