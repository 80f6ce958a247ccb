//! Sub-factor weighting by grey relational analysis.
//!
//! The chain is: min-max normalize each column (comparability sequences),
//! measure each entry's distance from the all-ones ideal sequence, convert
//! distances to relational coefficients with a threshold, average the
//! coefficients per column into correlation degrees, and normalize the
//! degrees into weights.

use nalgebra::DMatrix;

use crate::dataset::DecisionMatrix;
use crate::error::{Error, Result};

/// What to do with a column whose minimum equals its maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstantColumnPolicy {
    /// Reject the matrix: a constant criterion carries no information and
    /// min-max normalization would divide by zero.
    #[default]
    Error,
    /// Keep the column, mapping every entry to the ideal value 1.
    TreatAsIdeal,
}

/// Tuning knobs for the grey computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreyConfig {
    /// Distinguishing threshold in (0, 1] applied in the coefficient formula.
    pub threshold: f64,
    pub constant_column_policy: ConstantColumnPolicy,
}

impl Default for GreyConfig {
    fn default() -> Self {
        GreyConfig {
            threshold: 0.5,
            constant_column_policy: ConstantColumnPolicy::default(),
        }
    }
}

impl GreyConfig {
    pub fn validate(&self) -> Result<()> {
        // NaN must fail too, hence the is_nan arm.
        if self.threshold <= 0.0 || self.threshold > 1.0 || self.threshold.is_nan() {
            return Err(Error::InvalidThreshold {
                value: self.threshold,
            });
        }
        Ok(())
    }
}

/// Column-wise min-max normalized matrix; every non-degenerate column spans
/// [0, 1] and attains both endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparabilityMatrix {
    pub main_factor_id: String,
    pub sub_factor_ids: Vec<String>,
    pub alternative_ids: Vec<String>,
    pub values: DMatrix<f64>,
}

/// Entry-wise distance |1 - Y| from the all-ones ideal sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationalDegreeMatrix {
    pub main_factor_id: String,
    pub sub_factor_ids: Vec<String>,
    pub alternative_ids: Vec<String>,
    pub values: DMatrix<f64>,
}

/// Grey relational coefficients plus the global distance extremes they used.
#[derive(Debug, Clone, PartialEq)]
pub struct GreyCoefficientMatrix {
    pub main_factor_id: String,
    pub sub_factor_ids: Vec<String>,
    pub alternative_ids: Vec<String>,
    pub values: DMatrix<f64>,
    pub delta_min: f64,
    pub delta_max: f64,
    /// Set when every distance is zero (all alternatives ideal); the
    /// coefficients are then all ones by convention.
    pub degenerate: bool,
}

/// Normalized sub-factor weights for one main factor.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub main_factor_id: String,
    pub sub_factor_ids: Vec<String>,
    /// Per-column mean relational coefficient, before normalization.
    pub correlation_degrees: Vec<f64>,
    /// Degrees scaled to sum to 1.
    pub weights: Vec<f64>,
}

/// Everything the grey chain produces, for callers that want intermediates.
#[derive(Debug, Clone, PartialEq)]
pub struct GreyAnalysis {
    pub comparability: ComparabilityMatrix,
    pub relational: RelationalDegreeMatrix,
    pub coefficients: GreyCoefficientMatrix,
    pub weights: WeightVector,
}

/// Min-max normalize each column: Y = (X - min) / (max - min).
pub fn comparability(
    matrix: &DecisionMatrix,
    config: &GreyConfig,
) -> Result<ComparabilityMatrix> {
    config.validate()?;
    let (m, n) = (matrix.nrows(), matrix.ncols());
    let mut values = DMatrix::zeros(m, n);
    for j in 0..n {
        let column = matrix.values.column(j);
        let lo = column.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            match config.constant_column_policy {
                ConstantColumnPolicy::Error => {
                    return Err(Error::ConstantColumn {
                        column: matrix.sub_factor_ids[j].clone(),
                    });
                }
                ConstantColumnPolicy::TreatAsIdeal => {
                    for i in 0..m {
                        values[(i, j)] = 1.0;
                    }
                }
            }
        } else {
            for i in 0..m {
                values[(i, j)] = (matrix.values[(i, j)] - lo) / (hi - lo);
            }
        }
    }
    Ok(ComparabilityMatrix {
        main_factor_id: matrix.main_factor_id.clone(),
        sub_factor_ids: matrix.sub_factor_ids.clone(),
        alternative_ids: matrix.alternative_ids.clone(),
        values,
    })
}

/// Distance of each normalized entry from the ideal: delta = |1 - Y|.
pub fn relational_degree(comp: &ComparabilityMatrix) -> RelationalDegreeMatrix {
    RelationalDegreeMatrix {
        main_factor_id: comp.main_factor_id.clone(),
        sub_factor_ids: comp.sub_factor_ids.clone(),
        alternative_ids: comp.alternative_ids.clone(),
        values: comp.values.map(|y| (1.0 - y).abs()),
    }
}

/// Relational coefficients C = (dmin + th*dmax) / (delta + th*dmax), with the
/// extremes dmin/dmax taken over the whole matrix.
pub fn grey_coefficient(
    delta: &RelationalDegreeMatrix,
    config: &GreyConfig,
) -> Result<GreyCoefficientMatrix> {
    config.validate()?;
    let delta_min = delta.values.iter().copied().fold(f64::INFINITY, f64::min);
    let delta_max = delta
        .values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let degenerate = delta_max == 0.0;
    let values = if degenerate {
        DMatrix::from_element(delta.values.nrows(), delta.values.ncols(), 1.0)
    } else {
        let th = config.threshold;
        delta
            .values
            .map(|d| (delta_min + th * delta_max) / (d + th * delta_max))
    };
    Ok(GreyCoefficientMatrix {
        main_factor_id: delta.main_factor_id.clone(),
        sub_factor_ids: delta.sub_factor_ids.clone(),
        alternative_ids: delta.alternative_ids.clone(),
        values,
        delta_min,
        delta_max,
        degenerate,
    })
}

/// Correlation degree of each sub-factor: the mean coefficient of its column
/// over all alternatives.
pub fn correlation_degree(coeff: &GreyCoefficientMatrix) -> Vec<f64> {
    let m = coeff.values.nrows() as f64;
    (0..coeff.values.ncols())
        .map(|j| coeff.values.column(j).iter().sum::<f64>() / m)
        .collect()
}

/// Normalize correlation degrees into weights summing to 1.
pub fn weights(
    degrees: &[f64],
    main_factor_id: &str,
    sub_factor_ids: &[String],
) -> Result<WeightVector> {
    if degrees.len() != sub_factor_ids.len() {
        return Err(Error::DimensionMismatch {
            context: "weights".into(),
            expected: sub_factor_ids.len(),
            actual: degrees.len(),
        });
    }
    for (j, &degree) in degrees.iter().enumerate() {
        if degree <= 0.0 || degree.is_nan() {
            return Err(Error::NonPositiveDegree {
                column: sub_factor_ids[j].clone(),
                value: degree,
            });
        }
    }
    let total: f64 = degrees.iter().sum();
    Ok(WeightVector {
        main_factor_id: main_factor_id.to_string(),
        sub_factor_ids: sub_factor_ids.to_vec(),
        correlation_degrees: degrees.to_vec(),
        weights: degrees.iter().map(|d| d / total).collect(),
    })
}

/// Run the whole chain and keep the intermediates.
pub fn grey_analysis(matrix: &DecisionMatrix, config: &GreyConfig) -> Result<GreyAnalysis> {
    let comparability = comparability(matrix, config)?;
    let relational = relational_degree(&comparability);
    let coefficients = grey_coefficient(&relational, config)?;
    let degrees = correlation_degree(&coefficients);
    let weights = weights(&degrees, &matrix.main_factor_id, &matrix.sub_factor_ids)?;
    Ok(GreyAnalysis {
        comparability,
        relational,
        coefficients,
        weights,
    })
}

/// Run the whole chain and return only the weight vector.
pub fn grey_weights(matrix: &DecisionMatrix, config: &GreyConfig) -> Result<WeightVector> {
    Ok(grey_analysis(matrix, config)?.weights)
}
