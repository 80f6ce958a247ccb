//! Classifier evaluation: confusion-matrix statistics, probabilistic error
//! rates against a class-prior baseline, and a stratified k-fold
//! cross-validation harness.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::aggregate::RankingScoreMatrix;
use crate::error::{Error, Result};
use crate::imts::{self, InversionPolicy};

/// Counts of truth class (rows) versus predicted class (columns).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub class_names: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    /// Rows with truth class `i` (the class support).
    pub fn support(&self, i: usize) -> usize {
        self.counts[i].iter().sum()
    }

    /// Rows predicted as class `j`.
    pub fn predicted_count(&self, j: usize) -> usize {
        self.counts.iter().map(|row| row[j]).sum()
    }
}

/// Tally a confusion matrix from aligned truth/prediction label vectors.
pub fn confusion(
    truth: &[String],
    predicted: &[String],
    class_names: &[String],
) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            context: "confusion".into(),
            left: truth.len(),
            right: predicted.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput("confusion needs at least one row".into()));
    }
    let index_of = |label: &String| -> Result<usize> {
        class_names
            .iter()
            .position(|c| c == label)
            .ok_or_else(|| Error::UnknownLabel {
                label: label.clone(),
            })
    };
    let c = class_names.len();
    let mut counts = vec![vec![0usize; c]; c];
    for (t, p) in truth.iter().zip(predicted) {
        counts[index_of(t)?][index_of(p)?] += 1;
    }
    Ok(ConfusionMatrix {
        class_names: class_names.to_vec(),
        counts,
    })
}

/// Accuracy plus per-class and averaged precision/recall, all as percentages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationScores {
    pub accuracy: f64,
    pub precision_per_class: Vec<f64>,
    pub recall_per_class: Vec<f64>,
    pub precision_macro: f64,
    pub recall_macro: f64,
    /// Averages weighted by class support; the headline figures.
    pub precision_weighted: f64,
    pub recall_weighted: f64,
    /// Classes that were never predicted; their precision is reported as 0.
    pub zero_prediction_classes: Vec<String>,
}

/// One-vs-rest precision/recall per class, with macro and support-weighted
/// averages.
pub fn classification_scores(cm: &ConfusionMatrix) -> Result<ClassificationScores> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyInput("confusion matrix has no rows".into()));
    }
    let c = cm.class_names.len();
    let mut precision = Vec::with_capacity(c);
    let mut recall = Vec::with_capacity(c);
    let mut zero_prediction_classes = Vec::new();
    let mut correct = 0usize;
    for i in 0..c {
        let tp = cm.counts[i][i];
        correct += tp;
        let predicted = cm.predicted_count(i);
        let support = cm.support(i);
        if predicted == 0 {
            zero_prediction_classes.push(cm.class_names[i].clone());
            precision.push(0.0);
        } else {
            precision.push(100.0 * tp as f64 / predicted as f64);
        }
        recall.push(if support == 0 {
            0.0
        } else {
            100.0 * tp as f64 / support as f64
        });
    }
    let accuracy = 100.0 * correct as f64 / total as f64;
    let macro_avg = |v: &[f64]| v.iter().sum::<f64>() / c as f64;
    let weighted_avg = |v: &[f64]| {
        (0..c)
            .map(|i| v[i] * cm.support(i) as f64)
            .sum::<f64>()
            / total as f64
    };
    Ok(ClassificationScores {
        accuracy,
        precision_macro: macro_avg(&precision),
        recall_macro: macro_avg(&recall),
        precision_weighted: weighted_avg(&precision),
        recall_weighted: weighted_avg(&recall),
        precision_per_class: precision,
        recall_per_class: recall,
        zero_prediction_classes,
    })
}

/// The four probabilistic error rates, as percentages. `rae`/`rrse` are
/// `None` when the baseline itself has zero error (single-class truth), in
/// which case the ratios are undefined.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRates {
    pub mae: f64,
    pub rmse: f64,
    pub rae: Option<f64>,
    pub rrse: Option<f64>,
}

/// Error rates of predicted class distributions against one-hot truth, with
/// a single baseline distribution for every row.
pub fn error_rates(
    truth_onehot: &[Vec<f64>],
    predicted_prob: &[Vec<f64>],
    baseline_prob: &[f64],
) -> Result<ErrorRates> {
    let baselines = vec![baseline_prob.to_vec(); truth_onehot.len()];
    error_rates_with_baselines(truth_onehot, predicted_prob, &baselines)
}

/// Error rates where each row carries its own baseline distribution (cross-
/// validation pools rows whose baselines come from different training folds).
pub fn error_rates_with_baselines(
    truth_onehot: &[Vec<f64>],
    predicted_prob: &[Vec<f64>],
    baselines: &[Vec<f64>],
) -> Result<ErrorRates> {
    let m = truth_onehot.len();
    if m == 0 {
        return Err(Error::EmptyInput("error rates need at least one row".into()));
    }
    if predicted_prob.len() != m || baselines.len() != m {
        return Err(Error::LengthMismatch {
            context: "error rates".into(),
            left: m,
            right: predicted_prob.len().min(baselines.len()),
        });
    }
    let c = truth_onehot[0].len();
    for (row, (t, p)) in truth_onehot.iter().zip(predicted_prob).enumerate() {
        if t.len() != c || p.len() != c || baselines[row].len() != c {
            return Err(Error::DimensionMismatch {
                context: format!("error rates row {}", row + 1),
                expected: c,
                actual: t.len().min(p.len()).min(baselines[row].len()),
            });
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::BadProbabilityRow { row: row + 1, sum });
        }
    }

    let cells = (m * c) as f64;
    let mut abs_sum = 0.0;
    let mut sq_sum = 0.0;
    let mut abs_sum_base = 0.0;
    let mut sq_sum_base = 0.0;
    for i in 0..m {
        for j in 0..c {
            let err = predicted_prob[i][j] - truth_onehot[i][j];
            abs_sum += err.abs();
            sq_sum += err * err;
            let base_err = baselines[i][j] - truth_onehot[i][j];
            abs_sum_base += base_err.abs();
            sq_sum_base += base_err * base_err;
        }
    }
    let mae = 100.0 * abs_sum / cells;
    let rmse = 100.0 * (sq_sum / cells).sqrt();
    let mae_base = 100.0 * abs_sum_base / cells;
    let rmse_base = 100.0 * (sq_sum_base / cells).sqrt();
    let rae = (mae_base > 0.0).then(|| 100.0 * mae / mae_base);
    let rrse = (rmse_base > 0.0).then(|| 100.0 * rmse / rmse_base);
    Ok(ErrorRates {
        mae,
        rmse,
        rae,
        rrse,
    })
}

/// Everything an evaluation run reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub class_names: Vec<String>,
    pub n_rows: usize,
    pub scores: ClassificationScores,
    pub error_rates: ErrorRates,
    /// Number of cross-validation folds; 0 means the report scored an
    /// existing set of predictions instead of cross-validating.
    pub folds: usize,
    pub seed: u64,
    pub warnings: Vec<String>,
}

impl EvaluationReport {
    /// Canonical JSON rendering (pretty, trailing newline).
    pub fn to_json_string(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// Deterministic stratified fold assignment: within each class (in
/// `class_names` order) the row indices are shuffled by a seeded generator
/// and dealt round-robin over the folds. Returns the fold of each row.
pub fn stratified_folds(
    labels: &[String],
    class_names: &[String],
    k_folds: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if k_folds < 2 {
        return Err(Error::InvalidFolds { value: k_folds });
    }
    if k_folds > labels.len() {
        return Err(Error::TooManyFolds {
            k: k_folds,
            rows: labels.len(),
        });
    }
    for label in labels {
        if !class_names.contains(label) {
            return Err(Error::UnknownLabel {
                label: label.clone(),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; labels.len()];
    for class in class_names {
        let mut indices: Vec<usize> = (0..labels.len())
            .filter(|&i| labels[i] == *class)
            .collect();
        indices.shuffle(&mut rng);
        for (position, &row) in indices.iter().enumerate() {
            assignment[row] = position % k_folds;
        }
    }
    Ok(assignment)
}

/// Stratified k-fold cross-validation of the least-distance classifier over
/// a ranking matrix. Each fold trains per-class models on the remaining rows
/// and classifies the held-out rows with hard (one-hot) predicted
/// probabilities; metrics are pooled over all folds. The baseline for the
/// relative error rates is each row's training-fold class-prior distribution.
pub fn kfold_evaluate(
    scores: &RankingScoreMatrix,
    k_folds: usize,
    seed: u64,
    policy: InversionPolicy,
) -> Result<EvaluationReport> {
    let assignment = stratified_folds(&scores.labels, &scores.class_names, k_folds, seed)?;
    let class_names = &scores.class_names;
    let c = class_names.len();
    let class_index = |label: &String| -> usize {
        class_names
            .iter()
            .position(|x| x == label)
            .expect("labels validated against class names")
    };

    let mut truth: Vec<String> = Vec::with_capacity(scores.n_rows());
    let mut predicted: Vec<String> = Vec::with_capacity(scores.n_rows());
    let mut truth_onehot: Vec<Vec<f64>> = Vec::with_capacity(scores.n_rows());
    let mut predicted_prob: Vec<Vec<f64>> = Vec::with_capacity(scores.n_rows());
    let mut baselines: Vec<Vec<f64>> = Vec::with_capacity(scores.n_rows());
    let mut smallest_test_fold = usize::MAX;

    for fold in 0..k_folds {
        let train_indices: Vec<usize> = (0..scores.n_rows())
            .filter(|&i| assignment[i] != fold)
            .collect();
        let test_indices: Vec<usize> = (0..scores.n_rows())
            .filter(|&i| assignment[i] == fold)
            .collect();
        if test_indices.is_empty() {
            continue;
        }
        smallest_test_fold = smallest_test_fold.min(test_indices.len());

        let mut train_counts = vec![0usize; c];
        for &i in &train_indices {
            train_counts[class_index(&scores.labels[i])] += 1;
        }
        if let Some(i) = train_counts.iter().position(|&count| count == 0) {
            return Err(Error::ZeroTrainClass {
                fold,
                class: class_names[i].clone(),
            });
        }
        let priors: Vec<f64> = train_counts
            .iter()
            .map(|&count| count as f64 / train_indices.len() as f64)
            .collect();

        let models: Vec<imts::ClassModel> = class_names
            .iter()
            .map(|class| {
                let rows: Vec<usize> = train_indices
                    .iter()
                    .copied()
                    .filter(|&i| &scores.labels[i] == class)
                    .collect();
                let (values, _, _) = scores.select_rows(&rows);
                imts::fit_class_model(class, &scores.main_factor_ids, &values, policy)
            })
            .collect::<Result<_>>()
            .map_err(|e| e.in_fold(fold))?;

        for &i in &test_indices {
            let result = imts::classify(&models, &scores.alternative_ids[i], &scores.row(i))
                .map_err(|e| e.in_fold(fold))?;
            let mut onehot = vec![0.0; c];
            onehot[class_index(&scores.labels[i])] = 1.0;
            let mut prob = vec![0.0; c];
            prob[class_index(&result.predicted)] = 1.0;
            truth.push(scores.labels[i].clone());
            predicted.push(result.predicted);
            truth_onehot.push(onehot);
            predicted_prob.push(prob);
            baselines.push(priors.clone());
        }
    }

    let cm = confusion(&truth, &predicted, class_names)?;
    let scores_out = classification_scores(&cm)?;
    let error_rates = error_rates_with_baselines(&truth_onehot, &predicted_prob, &baselines)?;
    let mut warnings = Vec::new();
    if smallest_test_fold < c {
        warnings.push(format!(
            "smallest test fold has {smallest_test_fold} row(s), fewer than the {c} classes; \
             per-fold class coverage is partial (metrics are pooled over all folds)"
        ));
    }
    Ok(EvaluationReport {
        class_names: class_names.clone(),
        n_rows: scores.n_rows(),
        scores: scores_out,
        error_rates,
        folds: k_folds,
        seed,
        warnings,
    })
}

/// Score an existing set of hard or probabilistic predictions against truth
/// labels. The baseline is the class-prior distribution of the truth labels.
/// `folds` is reported as 0 and the seed as given (it only matters for
/// reproducing fold-based reports).
pub fn score_predictions(
    class_names: &[String],
    truth: &[String],
    predicted: &[String],
    predicted_prob: Option<&[Vec<f64>]>,
    seed: u64,
) -> Result<EvaluationReport> {
    let cm = confusion(truth, predicted, class_names)?;
    let scores = classification_scores(&cm)?;
    let c = class_names.len();
    let index_of = |label: &String| -> usize {
        class_names
            .iter()
            .position(|x| x == label)
            .expect("labels validated by confusion")
    };
    let truth_onehot: Vec<Vec<f64>> = truth
        .iter()
        .map(|t| {
            let mut row = vec![0.0; c];
            row[index_of(t)] = 1.0;
            row
        })
        .collect();
    let prob: Vec<Vec<f64>> = match predicted_prob {
        Some(prob) => prob.to_vec(),
        None => predicted
            .iter()
            .map(|p| {
                let mut row = vec![0.0; c];
                row[index_of(p)] = 1.0;
                row
            })
            .collect(),
    };
    let mut priors = vec![0.0; c];
    for t in truth {
        priors[index_of(t)] += 1.0;
    }
    for p in &mut priors {
        *p /= truth.len() as f64;
    }
    let error_rates = error_rates(&truth_onehot, &prob, &priors)?;
    Ok(EvaluationReport {
        class_names: class_names.to_vec(),
        n_rows: truth.len(),
        scores,
        error_rates,
        folds: 0,
        seed,
        warnings: Vec::new(),
    })
}
