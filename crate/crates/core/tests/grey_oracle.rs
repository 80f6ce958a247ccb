//! Grey weighting checked against the published soil tables and against the
//! brute-force reference implementation.

mod common;

use imts_core::dataset::{self, DecisionMatrix};
use imts_core::grey::{self, ConstantColumnPolicy, GreyConfig};
use imts_core::{fixtures, Error};

fn soil_matrix() -> DecisionMatrix {
    let ds = fixtures::table1_dataset();
    dataset::slice_main_factor(&ds, "mf1").expect("soil factor exists")
}

#[test]
fn soil_coefficients_match_published_values_to_four_decimals() {
    let analysis = grey::grey_analysis(&soil_matrix(), &GreyConfig::default()).unwrap();
    let (ids, reference) = fixtures::table4_matrix();
    assert_eq!(analysis.coefficients.sub_factor_ids, ids);
    let mut worst = 0.0f64;
    for i in 0..reference.nrows() {
        for j in 0..reference.ncols() {
            let dev = (analysis.coefficients.values[(i, j)] - reference[(i, j)]).abs();
            worst = worst.max(dev);
            assert!(
                dev <= 5e-4,
                "coefficient ({i},{j}): {} vs published {}",
                analysis.coefficients.values[(i, j)],
                reference[(i, j)]
            );
        }
    }
    println!("max coefficient deviation from published values: {worst:.2e}");
}

#[test]
fn soil_weights_match_published_values_and_sum_to_one() {
    let result = grey::grey_weights(&soil_matrix(), &GreyConfig::default()).unwrap();
    let reference = fixtures::table5_mf1_weights();
    assert_eq!(result.weights.len(), reference.len());
    for ((id, expected), actual) in reference.iter().zip(&result.weights) {
        assert!(
            (actual - expected).abs() <= 5e-4,
            "weight {id}: {actual} vs published {expected}"
        );
    }
    let sum: f64 = result.weights.iter().sum();
    assert!((sum - 1.0).abs() <= 1e-12, "weight sum {sum}");
}

#[test]
fn library_matches_brute_force_reference_on_seeded_instances() {
    let mut rng = common::TinyRng(0x5EED_0001);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let m = 2 + (rng.next_f64() * 7.0) as usize; // 2..=8 alternatives
        let k = 1 + (rng.next_f64() * 9.0) as usize; // 1..=9 sub-factors
        let rows = rng.matrix(m, k);
        let threshold = 0.05 + 0.95 * rng.next_f64(); // (0, 1]

        let ids: Vec<String> = (0..k).map(|j| format!("c{j}")).collect();
        let alt_ids: Vec<String> = (0..m).map(|i| format!("r{i}")).collect();
        let matrix = DecisionMatrix::from_rows("mf", ids, alt_ids, &rows).expect("valid matrix");
        let config = GreyConfig {
            threshold,
            ..GreyConfig::default()
        };
        let analysis = grey::grey_analysis(&matrix, &config).unwrap();
        let (ref_coeff, ref_weights) = common::grey_oracle(&rows, threshold);

        for (i, ref_row) in ref_coeff.iter().enumerate() {
            for (j, reference) in ref_row.iter().enumerate() {
                let dev = (analysis.coefficients.values[(i, j)] - reference).abs();
                worst = worst.max(dev);
                assert!(
                    dev <= 1e-12,
                    "case {case}: coefficient ({i},{j}) off by {dev:.2e}"
                );
            }
        }
        for (j, (weight, reference)) in
            analysis.weights.weights.iter().zip(&ref_weights).enumerate()
        {
            let dev = (weight - reference).abs();
            worst = worst.max(dev);
            assert!(dev <= 1e-12, "case {case}: weight {j} off by {dev:.2e}");
        }
        let sum: f64 = analysis.weights.weights.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12, "case {case}: weight sum {sum}");
    }
    println!("max deviation from brute-force reference over 50 instances: {worst:.2e}");
}

#[test]
fn constant_columns_follow_the_configured_policy() {
    let ids = vec!["flat".to_string(), "live".to_string()];
    let alt_ids = vec!["r0".to_string(), "r1".to_string()];
    let rows = vec![vec![3.0, 1.0], vec![3.0, 2.0]];
    let matrix = DecisionMatrix::from_rows("mf", ids, alt_ids, &rows).unwrap();

    let err = grey::grey_weights(&matrix, &GreyConfig::default()).unwrap_err();
    assert_eq!(err.code(), "CONSTANT_COLUMN");
    assert!(matches!(err, Error::ConstantColumn { ref column } if column == "flat"));

    let config = GreyConfig {
        constant_column_policy: ConstantColumnPolicy::TreatAsIdeal,
        ..GreyConfig::default()
    };
    let analysis = grey::grey_analysis(&matrix, &config).unwrap();
    // The constant column normalizes to the ideal value everywhere, so its
    // coefficients are all 1 and it takes the largest weight.
    for i in 0..2 {
        assert_eq!(analysis.comparability.values[(i, 0)], 1.0);
        assert_eq!(analysis.coefficients.values[(i, 0)], 1.0);
    }
    assert!(analysis.weights.weights[0] > analysis.weights.weights[1]);
    let sum: f64 = analysis.weights.weights.iter().sum();
    assert!((sum - 1.0).abs() <= 1e-12);
}

#[test]
fn thresholds_outside_unit_interval_are_rejected() {
    let matrix = soil_matrix();
    for bad in [0.0, -0.5, 1.5, f64::NAN] {
        let config = GreyConfig {
            threshold: bad,
            ..GreyConfig::default()
        };
        let err = grey::grey_weights(&matrix, &config).unwrap_err();
        assert_eq!(err.code(), "INVALID_THRESHOLD", "threshold {bad}");
    }
}
