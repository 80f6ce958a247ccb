//! Per-class Mahalanobis-distance models and least-distance classification.
//!
//! A class model standardizes incoming rows with the class's training means
//! and sample standard deviations, then measures
//! `MD = sqrt(z' * Cinv * z / k)` through the inverse of the training
//! correlation matrix. With fewer observations than features that matrix is
//! singular, so the inverse is obtained through a configurable policy built
//! on one symmetric eigendecomposition.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::aggregate::RankingScoreMatrix;
use crate::error::{Error, Result};

/// Relative eigenvalue cutoff of the pseudo-inverse: components with
/// eigenvalue <= cutoff * lambda_max are treated as null directions.
pub const PSEUDO_INVERSE_CUTOFF: f64 = 1e-10;
/// Condition-number limit above which the strict policy refuses to invert.
pub const STRICT_CONDITION_LIMIT: f64 = 1e12;
/// Default ridge regularization strength.
pub const DEFAULT_RIDGE_EPSILON: f64 = 1e-8;

/// How to invert the training correlation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum InversionPolicy {
    /// Plain inverse; fails when the condition number exceeds
    /// [`STRICT_CONDITION_LIMIT`].
    Strict,
    /// Truncated spectral pseudo-inverse (the default): eigencomponents below
    /// the relative cutoff are dropped.
    #[default]
    PseudoInverse,
    /// Invert `C + epsilon * I` instead of `C`.
    Ridge { epsilon: f64 },
}

impl InversionPolicy {
    /// Ridge with the default strength.
    pub fn default_ridge() -> Self {
        InversionPolicy::Ridge {
            epsilon: DEFAULT_RIDGE_EPSILON,
        }
    }

    /// Canonical lowercase name, used in model files and CLI flags.
    pub fn name(&self) -> &'static str {
        match self {
            InversionPolicy::Strict => "strict",
            InversionPolicy::PseudoInverse => "pseudo_inverse",
            InversionPolicy::Ridge { .. } => "ridge",
        }
    }

    /// Regularization strength, for the ridge policy only.
    pub fn epsilon(&self) -> Option<f64> {
        match self {
            InversionPolicy::Ridge { epsilon } => Some(*epsilon),
            _ => None,
        }
    }

    /// Parse a policy name plus optional ridge strength. Accepted names:
    /// `strict`, `pseudo_inverse` (aliases `pinv`, `pseudo-inverse`), `ridge`.
    pub fn parse(name: &str, epsilon: Option<f64>) -> Result<Self> {
        match name {
            "strict" => Ok(InversionPolicy::Strict),
            "pinv" | "pseudo_inverse" | "pseudo-inverse" => Ok(InversionPolicy::PseudoInverse),
            "ridge" => {
                let epsilon = epsilon.unwrap_or(DEFAULT_RIDGE_EPSILON);
                if epsilon <= 0.0 || !epsilon.is_finite() {
                    return Err(Error::InvalidPolicy {
                        message: format!("ridge epsilon must be a positive number, got {epsilon}"),
                    });
                }
                Ok(InversionPolicy::Ridge { epsilon })
            }
            other => Err(Error::InvalidPolicy {
                message: format!(
                    "unknown policy `{other}` (expected strict, pseudo_inverse, or ridge)"
                ),
            }),
        }
    }
}

/// How the correlation matrix was inverted, for the record.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionInfo {
    pub policy: InversionPolicy,
    /// Numerical rank of the correlation matrix at the pseudo-inverse cutoff.
    pub rank: usize,
    /// Condition estimate `lambda_max / lambda_min`; `None` when the smallest
    /// eigenvalue is zero or negative (condition unbounded).
    pub condition: Option<f64>,
}

/// A fitted per-class model.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassModel {
    pub class_name: String,
    pub feature_ids: Vec<String>,
    /// Training mean of each feature.
    pub means: Vec<f64>,
    /// Training sample standard deviation (n-1 denominator) of each feature.
    pub stds: Vec<f64>,
    /// Inverse (by policy) of the training correlation matrix.
    pub inv_correlation: DMatrix<f64>,
    pub inversion: InversionInfo,
    pub n_train: usize,
}

impl ClassModel {
    /// Number of features.
    pub fn k(&self) -> usize {
        self.feature_ids.len()
    }
}

/// Result of classifying one observation against all class models.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub alternative_id: String,
    /// Mahalanobis distance under each class model, in model order.
    pub distances: Vec<(String, f64)>,
    pub predicted: String,
    /// True when another class attains exactly the same minimum distance;
    /// the first class in model order wins.
    pub tie: bool,
}

/// Fit a class model from that class's observation rows (one row per
/// observation, one column per feature).
pub fn fit_class_model(
    class_name: &str,
    feature_ids: &[String],
    observations: &DMatrix<f64>,
    policy: InversionPolicy,
) -> Result<ClassModel> {
    let n = observations.nrows();
    let k = observations.ncols();
    if n < 2 {
        return Err(Error::TrainTooSmall {
            class: class_name.to_string(),
            n,
        });
    }
    if k == 0 || k != feature_ids.len() {
        return Err(Error::DimensionMismatch {
            context: format!("fitting class `{class_name}`"),
            expected: feature_ids.len(),
            actual: k,
        });
    }
    if let Some(epsilon) = policy.epsilon() {
        if epsilon <= 0.0 || !epsilon.is_finite() {
            return Err(Error::InvalidPolicy {
                message: format!("ridge epsilon must be a positive number, got {epsilon}"),
            });
        }
    }

    let mut means = Vec::with_capacity(k);
    let mut stds = Vec::with_capacity(k);
    for (feature, column) in feature_ids.iter().zip(observations.column_iter()) {
        let mean = column.iter().sum::<f64>() / n as f64;
        let ss = column.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
        let std = (ss / (n as f64 - 1.0)).sqrt();
        if std == 0.0 {
            return Err(Error::ZeroStd {
                class: class_name.to_string(),
                feature: feature.clone(),
            });
        }
        means.push(mean);
        stds.push(std);
    }

    let z = DMatrix::from_fn(n, k, |i, j| (observations[(i, j)] - means[j]) / stds[j]);
    let mut correlation = z.transpose() * &z / (n as f64 - 1.0);
    symmetrize(&mut correlation);

    let (inv_correlation, rank, condition) =
        invert_correlation(&correlation, policy, class_name)?;

    Ok(ClassModel {
        class_name: class_name.to_string(),
        feature_ids: feature_ids.to_vec(),
        means,
        stds,
        inv_correlation,
        inversion: InversionInfo {
            policy,
            rank,
            condition,
        },
        n_train: n,
    })
}

/// Fit one model per class of a ranking matrix, in class-name order.
pub fn fit_all_classes(
    scores: &RankingScoreMatrix,
    policy: InversionPolicy,
) -> Result<Vec<ClassModel>> {
    scores
        .class_names
        .iter()
        .map(|class| {
            let rows = scores.class_rows(class);
            fit_class_model(class, &scores.main_factor_ids, &rows, policy)
        })
        .collect()
}

fn symmetrize(matrix: &mut DMatrix<f64>) {
    let k = matrix.nrows();
    for i in 0..k {
        for j in (i + 1)..k {
            let v = 0.5 * (matrix[(i, j)] + matrix[(j, i)]);
            matrix[(i, j)] = v;
            matrix[(j, i)] = v;
        }
    }
}

/// Invert through one symmetric eigendecomposition, per policy. Returns the
/// inverse, the numerical rank, and the condition estimate of the original
/// matrix.
fn invert_correlation(
    correlation: &DMatrix<f64>,
    policy: InversionPolicy,
    class_name: &str,
) -> Result<(DMatrix<f64>, usize, Option<f64>)> {
    let eigen = correlation.clone().symmetric_eigen();
    let lambda = &eigen.eigenvalues;
    let v = &eigen.eigenvectors;
    let lambda_max = lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lambda_min = lambda.iter().copied().fold(f64::INFINITY, f64::min);
    // A correlation matrix has unit diagonal, so its largest eigenvalue is
    // at least 1; the cutoff is therefore always positive.
    let cutoff = PSEUDO_INVERSE_CUTOFF * lambda_max;
    let rank = lambda.iter().filter(|&&l| l > cutoff).count();
    let condition = if lambda_min > 0.0 {
        Some(lambda_max / lambda_min)
    } else {
        None
    };

    let reciprocal: DVector<f64> = match policy {
        InversionPolicy::Strict => {
            let ill = match condition {
                None => true,
                Some(c) => c > STRICT_CONDITION_LIMIT || c.is_nan(),
            };
            if ill {
                return Err(Error::Singular {
                    class: class_name.to_string(),
                    condition: condition.unwrap_or(f64::INFINITY),
                    limit: STRICT_CONDITION_LIMIT,
                });
            }
            lambda.map(|l| 1.0 / l)
        }
        InversionPolicy::PseudoInverse => lambda.map(|l| if l > cutoff { 1.0 / l } else { 0.0 }),
        InversionPolicy::Ridge { epsilon } => lambda.map(|l| 1.0 / (l + epsilon)),
    };

    let mut scaled = v.clone();
    for (j, r) in reciprocal.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*r);
    }
    let mut inverse = scaled * v.transpose();
    symmetrize(&mut inverse);
    Ok((inverse, rank, condition))
}

/// Mahalanobis distance of one observation under one model.
pub fn test_distance(model: &ClassModel, observation: &[f64]) -> Result<f64> {
    let k = model.k();
    if observation.len() != k {
        return Err(Error::DimensionMismatch {
            context: format!("observation for class `{}`", model.class_name),
            expected: k,
            actual: observation.len(),
        });
    }
    let z = DVector::from_fn(k, |j, _| (observation[j] - model.means[j]) / model.stds[j]);
    let quadratic = (&model.inv_correlation * &z).dot(&z);
    // Tiny negative values can appear through rounding in the quadratic form.
    Ok((quadratic.max(0.0) / k as f64).sqrt())
}

/// Distances of the fitting rows themselves.
pub fn training_distances(model: &ClassModel, observations: &DMatrix<f64>) -> Result<Vec<f64>> {
    (0..observations.nrows())
        .map(|i| {
            let row: Vec<f64> = observations.row(i).iter().copied().collect();
            test_distance(model, &row)
        })
        .collect()
}

/// Classify one observation by the least-distance rule. Ties go to the
/// earliest model in the list, and are flagged.
pub fn classify(
    models: &[ClassModel],
    alternative_id: &str,
    observation: &[f64],
) -> Result<ClassificationResult> {
    if models.len() < 2 {
        return Err(Error::EmptyInput(format!(
            "classification needs at least 2 class models, got {}",
            models.len()
        )));
    }
    let feature_ids = &models[0].feature_ids;
    for model in &models[1..] {
        if &model.feature_ids != feature_ids {
            return Err(Error::FeatureSetMismatch {
                class: model.class_name.clone(),
            });
        }
    }
    let mut distances = Vec::with_capacity(models.len());
    for model in models {
        distances.push((model.class_name.clone(), test_distance(model, observation)?));
    }
    let (best, _) = distances
        .iter()
        .enumerate()
        .min_by(|(_, (_, a)), (_, (_, b))| a.partial_cmp(b).expect("distances are finite"))
        .expect("at least two models");
    let minimum = distances[best].1;
    let tie = distances
        .iter()
        .enumerate()
        .any(|(i, (_, d))| i != best && *d == minimum);
    Ok(ClassificationResult {
        alternative_id: alternative_id.to_string(),
        distances: distances.clone(),
        predicted: distances[best].0.clone(),
        tie,
    })
}

/// Classify many rows at once; `ids` and `rows` are aligned.
pub fn classify_rows(
    models: &[ClassModel],
    ids: &[String],
    rows: &DMatrix<f64>,
) -> Result<Vec<ClassificationResult>> {
    if ids.len() != rows.nrows() {
        return Err(Error::LengthMismatch {
            context: "classify_rows".into(),
            left: ids.len(),
            right: rows.nrows(),
        });
    }
    (0..rows.nrows())
        .map(|i| {
            let row: Vec<f64> = rows.row(i).iter().copied().collect();
            classify(models, &ids[i], &row)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Model (de)serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    class_name: String,
    feature_ids: Vec<String>,
    means: Vec<f64>,
    stds: Vec<f64>,
    /// Row-major k*k matrix.
    inv_correlation: Vec<f64>,
    inversion: InversionFile,
    n_train: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InversionFile {
    policy: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    rank: usize,
    /// `null` encodes an unbounded condition number.
    condition: Option<f64>,
}

impl ClassModel {
    /// Serialize as pretty JSON at full floating-point precision, so a model
    /// re-loaded from disk reproduces bit-identical distances.
    pub fn to_json_string(&self) -> String {
        let k = self.k();
        let file = ModelFile {
            class_name: self.class_name.clone(),
            feature_ids: self.feature_ids.clone(),
            means: self.means.clone(),
            stds: self.stds.clone(),
            inv_correlation: (0..k)
                .flat_map(|i| (0..k).map(move |j| (i, j)))
                .map(|(i, j)| self.inv_correlation[(i, j)])
                .collect(),
            inversion: InversionFile {
                policy: self.inversion.policy.name().to_string(),
                epsilon: self.inversion.policy.epsilon(),
                rank: self.inversion.rank,
                condition: self.inversion.condition,
            },
            n_train: self.n_train,
        };
        let mut text = serde_json::to_string_pretty(&file).expect("model serializes");
        text.push('\n');
        text
    }

    /// Inverse of [`ClassModel::to_json_string`].
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::MalformedJson {
            message: e.to_string(),
        })?;
        let k = file.feature_ids.len();
        if file.means.len() != k || file.stds.len() != k {
            return Err(Error::DimensionMismatch {
                context: format!("model for class `{}`", file.class_name),
                expected: k,
                actual: file.means.len().min(file.stds.len()),
            });
        }
        if file.inv_correlation.len() != k * k {
            return Err(Error::DimensionMismatch {
                context: format!("inverse correlation for class `{}`", file.class_name),
                expected: k * k,
                actual: file.inv_correlation.len(),
            });
        }
        if let Some(j) = file.stds.iter().position(|s| *s <= 0.0 || s.is_nan()) {
            return Err(Error::ZeroStd {
                class: file.class_name.clone(),
                feature: file.feature_ids[j].clone(),
            });
        }
        let policy = InversionPolicy::parse(&file.inversion.policy, file.inversion.epsilon)?;
        Ok(ClassModel {
            class_name: file.class_name,
            feature_ids: file.feature_ids,
            means: file.means,
            stds: file.stds,
            inv_correlation: DMatrix::from_row_slice(k, k, &file.inv_correlation),
            inversion: InversionInfo {
                policy,
                rank: file.inversion.rank,
                condition: file.inversion.condition,
            },
            n_train: file.n_train,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text).map_err(|e| e.in_file(path))
    }
}
