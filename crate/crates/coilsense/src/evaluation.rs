//! Leave-one-coil-out cross-validation, RMSE, component selection and
//! classification metrics.

use std::collections::BTreeSet;

use ndarray::Array2;
use rayon::prelude::*;

use crate::data::{CoilId, LabeledDataset};
use crate::error::{Error, Result};
use crate::models::{pls_fit, Predict};

/// One evaluated fold of leave-one-coil-out cross-validation.
#[derive(Debug, Clone)]
pub struct FoldResult {
    pub coil_id: CoilId,
    /// Row indices of the held-out coil in the original dataset.
    pub row_indices: Vec<usize>,
    pub predictions: Array2<f64>,
    pub targets: Array2<f64>,
    /// RMSE per target (t1, t2) on this fold.
    pub rmse: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct SkippedFold {
    pub coil_id: CoilId,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct CvResult {
    pub folds: Vec<FoldResult>,
    pub skipped: Vec<SkippedFold>,
    /// Unweighted mean over folds of the per-fold RMSE, per target.
    pub mean_rmse: [f64; 2],
}

impl CvResult {
    /// Scatter rows (property index, target, prediction, coil, fold) for
    /// plotting predicted-vs-true.
    pub fn scatter(&self) -> Vec<(usize, f64, f64, CoilId, usize)> {
        let mut out = Vec::new();
        for (fold, f) in self.folds.iter().enumerate() {
            for i in 0..f.targets.nrows() {
                for property in 0..2 {
                    out.push((
                        property,
                        f.targets[[i, property]],
                        f.predictions[[i, property]],
                        f.coil_id.clone(),
                        fold,
                    ));
                }
            }
        }
        out
    }
}

/// Cross-validation where each fold holds out every row of one coil.
///
/// Folds are formed over the set of distinct coil ids (sorted, so the result
/// does not depend on row order), training rows are assembled in sorted-coil
/// order, and the fitter sees only training data; standardization happens
/// inside the fitter on those rows alone. Folds whose training data cannot
/// be fitted (for example a target without variance) are skipped and
/// reported.
pub fn leave_one_coil_out_cv<M, F>(data: &LabeledDataset, fit: F) -> Result<CvResult>
where
    M: Predict + Send,
    F: Fn(&Array2<f64>, &Array2<f64>) -> Result<M> + Sync,
{
    let coil_set: BTreeSet<&CoilId> = data.row_coil.iter().collect();
    if coil_set.len() < 2 {
        return Err(Error::InvalidArgument(
            "cross-validation needs at least 2 distinct coils".into(),
        ));
    }
    let coils: Vec<CoilId> = coil_set.into_iter().cloned().collect();

    // stable order: rows grouped by sorted coil id, original order within
    let order_of = |id: &CoilId| coils.binary_search(id).expect("known coil");

    let outcomes: Vec<std::result::Result<FoldResult, SkippedFold>> = coils
        .par_iter()
        .map(|held_out| {
            let mut train_rows: Vec<usize> = (0..data.n())
                .filter(|&i| &data.row_coil[i] != held_out)
                .collect();
            train_rows.sort_by_key(|&i| (order_of(&data.row_coil[i]), i));
            let val_rows: Vec<usize> = (0..data.n())
                .filter(|&i| &data.row_coil[i] == held_out)
                .collect();

            let x_train = select_rows(&data.x, &train_rows);
            let y_train = select_rows(&data.y, &train_rows);
            let x_val = select_rows(&data.x, &val_rows);
            let y_val = select_rows(&data.y, &val_rows);

            let model = match fit(&x_train, &y_train) {
                Ok(m) => m,
                Err(e) => {
                    return Err(SkippedFold {
                        coil_id: held_out.clone(),
                        reason: e.to_string(),
                    })
                }
            };
            let predictions = match model.predict(&x_val) {
                Ok(p) => p,
                Err(e) => {
                    return Err(SkippedFold {
                        coil_id: held_out.clone(),
                        reason: e.to_string(),
                    })
                }
            };
            let rmse_t = [
                rmse(
                    predictions.column(0).to_vec().as_slice(),
                    y_val.column(0).to_vec().as_slice(),
                )
                .expect("equal lengths"),
                rmse(
                    predictions.column(1).to_vec().as_slice(),
                    y_val.column(1).to_vec().as_slice(),
                )
                .expect("equal lengths"),
            ];
            Ok(FoldResult {
                coil_id: held_out.clone(),
                row_indices: val_rows,
                predictions,
                targets: y_val,
                rmse: rmse_t,
            })
        })
        .collect();

    let mut folds = Vec::new();
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(f) => folds.push(f),
            Err(s) => skipped.push(s),
        }
    }
    if folds.is_empty() {
        return Err(Error::InvalidArgument(
            "every cross-validation fold was skipped".into(),
        ));
    }
    let mut mean_rmse = [0.0; 2];
    for f in &folds {
        mean_rmse[0] += f.rmse[0];
        mean_rmse[1] += f.rmse[1];
    }
    mean_rmse[0] /= folds.len() as f64;
    mean_rmse[1] /= folds.len() as f64;

    Ok(CvResult {
        folds,
        skipped,
        mean_rmse,
    })
}

/// Leave-one-coil-out CV of the PLS model with `k` latent variables.
pub fn pls_loco_cv(data: &LabeledDataset, k: usize) -> Result<CvResult> {
    leave_one_coil_out_cv(data, |x, y| pls_fit(x, y, k))
}

pub(crate) fn select_rows(m: &Array2<f64>, rows: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros((rows.len(), m.ncols()));
    for (dst, &src) in rows.iter().enumerate() {
        out.row_mut(dst).assign(&m.row(src));
    }
    out
}

/// Root mean squared error.
pub fn rmse(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} predictions", targets.len()),
            actual: format!("{}", predictions.len()),
        });
    }
    if predictions.is_empty() {
        return Err(Error::EmptyInput("rmse of empty vectors"));
    }
    let sq: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok((sq / predictions.len() as f64).sqrt())
}

#[derive(Debug, Clone)]
pub struct KSelectionRow {
    pub k: usize,
    /// Mean over folds of the per-fold RMSE, per target.
    pub mean_rmse: [f64; 2],
    /// Mean over folds of the per-fold RMSE averaged over targets.
    pub combined: f64,
    /// Standard error of the combined per-fold RMSE.
    pub std_error: f64,
}

#[derive(Debug, Clone)]
pub struct KSelection {
    pub rows: Vec<KSelectionRow>,
    /// Smallest k whose combined RMSE is within one standard error of the
    /// minimum.
    pub selected_k: usize,
}

/// Sweeps the number of latent variables and applies the one-standard-error
/// rule.
pub fn select_k(data: &LabeledDataset, k_max: usize) -> Result<KSelection> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be >= 1".into()));
    }
    let mut rows = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let cv = pls_loco_cv(data, k)?;
        let per_fold: Vec<f64> = cv.folds.iter().map(|f| (f.rmse[0] + f.rmse[1]) / 2.0).collect();
        let combined = per_fold.iter().sum::<f64>() / per_fold.len() as f64;
        let std_error = if per_fold.len() > 1 {
            crate::preprocess::sample_std(&per_fold) / (per_fold.len() as f64).sqrt()
        } else {
            0.0
        };
        rows.push(KSelectionRow {
            k,
            mean_rmse: cv.mean_rmse,
            combined,
            std_error,
        });
    }
    let best = rows
        .iter()
        .min_by(|a, b| a.combined.total_cmp(&b.combined))
        .expect("k_max >= 1");
    let threshold = best.combined + best.std_error;
    let selected_k = rows
        .iter()
        .find(|r| r.combined <= threshold)
        .expect("at least the minimum qualifies")
        .k;
    Ok(KSelection { rows, selected_k })
}

/// 2x2 confusion counts; "positive" means out of specification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_positive: usize,
    pub false_negative: usize,
    pub false_positive: usize,
    pub true_negative: usize,
}

impl ConfusionCounts {
    pub fn new(tp: usize, fneg: usize, fpos: usize, tn: usize) -> Self {
        ConfusionCounts {
            true_positive: tp,
            false_negative: fneg,
            false_positive: fpos,
            true_negative: tn,
        }
    }

    pub fn total(&self) -> usize {
        self.true_positive + self.false_negative + self.false_positive + self.true_negative
    }
}

pub fn confusion(prediction_flags: &[bool], truth_flags: &[bool]) -> Result<ConfusionCounts> {
    if prediction_flags.len() != truth_flags.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} flags", truth_flags.len()),
            actual: format!("{}", prediction_flags.len()),
        });
    }
    let mut c = ConfusionCounts::new(0, 0, 0, 0);
    for (&pred, &truth) in prediction_flags.iter().zip(truth_flags) {
        match (pred, truth) {
            (true, true) => c.true_positive += 1,
            (false, true) => c.false_negative += 1,
            (true, false) => c.false_positive += 1,
            (false, false) => c.true_negative += 1,
        }
    }
    Ok(c)
}

/// Precision, recall and F-beta. `None` marks an undefined value (zero
/// denominator) so reports can print it distinctly instead of silently
/// substituting 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationMetrics {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f_beta: Option<f64>,
    pub beta: f64,
}

pub fn precision_recall_fbeta(c: &ConfusionCounts, beta: f64) -> Result<ClassificationMetrics> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "beta must be positive, got {beta}"
        )));
    }
    let tp = c.true_positive as f64;
    let precision = if c.true_positive + c.false_positive > 0 {
        Some(tp / (c.true_positive + c.false_positive) as f64)
    } else {
        None
    };
    let recall = if c.true_positive + c.false_negative > 0 {
        Some(tp / (c.true_positive + c.false_negative) as f64)
    } else {
        None
    };
    let f_beta = match (precision, recall) {
        (Some(p), Some(r)) => {
            let b2 = beta * beta;
            let denom = b2 * p + r;
            if denom > 0.0 {
                Some((1.0 + b2) * p * r / denom)
            } else {
                None
            }
        }
        _ => None,
    };
    Ok(ClassificationMetrics {
        precision,
        recall,
        f_beta,
        beta,
    })
}

/// Area under the ROC curve as the Mann-Whitney rank statistic: the
/// probability that a random positive outranks a random negative, ties
/// counted half.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} scores", labels.len()),
            actual: format!("{}", scores.len()),
        });
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // midranks over tie groups, 1-based
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            if labels[idx] {
                rank_sum_pos += midrank;
            }
        }
        i = j + 1;
    }

    let n_pos_f = n_pos as f64;
    let auc = (rank_sum_pos - n_pos_f * (n_pos_f + 1.0) / 2.0) / (n_pos_f * n_neg as f64);
    Ok(auc)
}
