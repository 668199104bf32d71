//! Evaluation metrics: misclassification rate, confusion matrix, cluster
//! purity.

use crate::error::{Error, Result};
use crate::num::Real;
use std::collections::BTreeMap;

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a == 0 {
        return Err(Error::data("empty label vectors"));
    }
    if a != b {
        return Err(Error::Dimension { expected: a, actual: b });
    }
    Ok(())
}

/// Fraction of mismatching labels, in [0, 1].
pub fn misclassification_rate<R: Real>(pred: &[usize], truth: &[usize]) -> Result<R> {
    check_lengths(pred.len(), truth.len())?;
    let wrong = pred.iter().zip(truth).filter(|(a, b)| a != b).count();
    Ok(R::of_usize(wrong) / R::of_usize(pred.len()))
}

/// `confusion[t][p]` counts rows with true class `t` predicted as `p`.
pub fn confusion_matrix(pred: &[usize], truth: &[usize], n_classes: usize) -> Result<Vec<Vec<usize>>> {
    check_lengths(pred.len(), truth.len())?;
    let mut m = vec![vec![0usize; n_classes]; n_classes];
    for (&p, &t) in pred.iter().zip(truth) {
        if p >= n_classes || t >= n_classes {
            return Err(Error::data("label outside [0, n_classes)"));
        }
        m[t][p] += 1;
    }
    Ok(m)
}

/// Cluster purity: each cluster is credited with its majority true class;
/// the credited counts are summed and divided by the total.
pub fn cluster_purity<R: Real>(clusters: &[usize], truth: &[usize]) -> Result<R> {
    check_lengths(clusters.len(), truth.len())?;
    let mut per_cluster: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    for (&c, &t) in clusters.iter().zip(truth) {
        *per_cluster.entry(c).or_default().entry(t).or_default() += 1;
    }
    let majority_sum: usize =
        per_cluster.values().map(|counts| counts.values().max().copied().unwrap_or(0)).sum();
    Ok(R::of_usize(majority_sum) / R::of_usize(clusters.len()))
}
