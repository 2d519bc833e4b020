//! Binary classification metrics: macro-averaged F1 and ROC AUC.

use crate::error::{Error, Result};

/// Per-class F1 from confusion counts. A class that is neither present nor
/// predicted scores 1.
fn class_f1(tp: usize, fp: usize, fn_: usize) -> f64 {
    if tp + fp + fn_ == 0 {
        1.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
    }
}

/// Unweighted mean of the F1 scores of classes 0 and 1.
pub fn f1_macro(y_true: &[usize], y_pred: &[usize]) -> Result<f64> {
    if y_true.is_empty() {
        return Err(Error::Metric("f1_macro of an empty set".into()));
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            expected: y_true.len(),
            actual: y_pred.len(),
        });
    }
    let mut counts = [[0usize; 2]; 2];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t > 1 || p > 1 {
            return Err(Error::Metric(format!("non-binary label pair ({t}, {p})")));
        }
        counts[t][p] += 1;
    }
    let f1_0 = class_f1(counts[0][0], counts[1][0], counts[0][1]);
    let f1_1 = class_f1(counts[1][1], counts[0][1], counts[1][0]);
    Ok((f1_0 + f1_1) / 2.0)
}

/// Area under the ROC curve via the Mann–Whitney statistic with average
/// ranks for ties, i.e. the probability that a random positive outranks a
/// random negative, counting ties as one half.
pub fn auc_roc(y_true: &[usize], scores: &[f64]) -> Result<f64> {
    if y_true.len() != scores.len() {
        return Err(Error::LengthMismatch {
            expected: y_true.len(),
            actual: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Metric("NaN score".into()));
    }
    let n_pos = y_true.iter().filter(|&&y| y == 1).count();
    let n_neg = y_true.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Metric("AUC needs both classes present".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // Ranks i+1 ..= j share their mean.
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        let pos_in_run = order[i..j].iter().filter(|&&k| y_true[k] == 1).count();
        rank_sum_pos += avg_rank * pos_in_run as f64;
        i = j;
    }
    let (p, n) = (n_pos as f64, n_neg as f64);
    Ok((rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n))
}
