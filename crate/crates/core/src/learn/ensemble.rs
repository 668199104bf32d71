//! Tree ensembles: extremely randomized trees (majority vote) and SAMME
//! multiclass AdaBoost over shallow weighted trees.

use crate::error::{Error, Result};
use crate::learn::tree::{argmax_tie_low, fit_tree, DecisionTree, TreeParams, TreeTarget};
use crate::matrix::Matrix;
use crate::num::Real;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    ExtraTrees,
    AdaBoost,
}

/// How labels are modeled inside the trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleTarget {
    /// Classification trees, majority vote.
    ClassLabels,
    /// Regression trees on the raw label codes; the averaged prediction is
    /// rounded to the nearest class. Fidelity variant, extra-trees only.
    LabelCodeRegression,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeEnsemble<R> {
    pub kind: EnsembleKind,
    pub trees: Vec<DecisionTree<R>>,
    pub n_classes: usize,
    /// SAMME stage weights; `None` for extra trees.
    pub boost_weights: Option<Vec<R>>,
    pub target: EnsembleTarget,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtraTreesConfig {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    /// Candidate features per split; `None` means ceil(sqrt(dim)).
    pub k_features: Option<usize>,
    pub min_samples_split: usize,
    pub target: EnsembleTarget,
}

impl Default for ExtraTreesConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            k_features: None,
            min_samples_split: 2,
            target: EnsembleTarget::ClassLabels,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaBoostConfig {
    pub n_rounds: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for AdaBoostConfig {
    fn default() -> Self {
        Self { n_rounds: 50, max_depth: 3, min_samples_split: 2 }
    }
}

fn check_labels(x: &Matrix<impl Real>, y: &[usize]) -> Result<usize> {
    if x.rows() == 0 {
        return Err(Error::data("empty training set"));
    }
    if x.rows() != y.len() {
        return Err(Error::Dimension { expected: x.rows(), actual: y.len() });
    }
    Ok(y.iter().max().copied().unwrap_or(0) + 1)
}

fn tree_rng(seed: u64, index: usize) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Fit an extremely-randomized forest; every tree sees the full training
/// set, randomness comes only from the feature/threshold draws.
pub fn extra_trees_fit<R: Real>(
    x: &Matrix<R>,
    y: &[usize],
    config: &ExtraTreesConfig,
    seed: u64,
) -> Result<TreeEnsemble<R>> {
    let n_classes = check_labels(x, y)?;
    if config.n_trees == 0 {
        return Err(Error::config("n_trees must be at least 1"));
    }
    let params = TreeParams {
        max_depth: config.max_depth,
        min_samples_split: config.min_samples_split.max(2),
        k_features: config.k_features,
    };
    let weights = vec![R::one(); x.rows()];
    let y_codes: Vec<R>;
    let target = match config.target {
        EnsembleTarget::ClassLabels => TreeTarget::Classes { y, n_classes },
        EnsembleTarget::LabelCodeRegression => {
            y_codes = y.iter().map(|&c| R::of_usize(c)).collect();
            TreeTarget::Regression { y: &y_codes }
        }
    };

    let trees = (0..config.n_trees)
        .map(|i| fit_tree(x, &target, &weights, &params, &mut tree_rng(seed, i)))
        .collect();
    Ok(TreeEnsemble {
        kind: EnsembleKind::ExtraTrees,
        trees,
        n_classes,
        boost_weights: None,
        target: config.target,
    })
}

/// SAMME multiclass AdaBoost over shallow weighted classification trees.
/// Boosting stops early when a round's weighted error reaches the random
/// -guessing bound `1 - 1/n_classes` (the ensemble built so far is
/// returned) or when a round classifies the weighted sample perfectly.
pub fn adaboost_fit<R: Real>(
    x: &Matrix<R>,
    y: &[usize],
    config: &AdaBoostConfig,
    seed: u64,
) -> Result<TreeEnsemble<R>> {
    let n_classes = check_labels(x, y)?;
    if config.n_rounds == 0 {
        return Err(Error::config("n_rounds must be at least 1"));
    }
    let n = x.rows();
    let params = TreeParams {
        max_depth: Some(config.max_depth),
        min_samples_split: config.min_samples_split.max(2),
        // Boosted weak learners search every feature.
        k_features: Some(x.cols()),
    };
    let target = TreeTarget::Classes { y, n_classes };
    let guess_bound = R::one() - R::one() / R::of_usize(n_classes.max(2));

    let mut weights = vec![R::one() / R::of_usize(n); n];
    let mut trees = Vec::new();
    let mut alphas: Vec<R> = Vec::new();

    for round in 0..config.n_rounds {
        let tree = fit_tree(x, &target, &weights, &params, &mut tree_rng(seed, round));
        let wrong: Vec<bool> =
            x.iter_rows().enumerate().map(|(i, row)| tree.predict_class(row) != y[i]).collect();
        let err: R = weights
            .iter()
            .zip(&wrong)
            .filter(|(_, &w)| w)
            .map(|(&v, _)| v)
            .sum();

        if err >= guess_bound {
            break;
        }
        let eps = R::of(1e-12);
        let err_c = err.max(eps).min(R::one() - eps);
        let alpha = ((R::one() - err_c) / err_c).ln() + R::of_usize(n_classes.max(2) - 1).ln();
        trees.push(tree);
        alphas.push(alpha);

        if err <= eps {
            break;
        }
        let boost = alpha.exp();
        let mut total = R::zero();
        for (w, &bad) in weights.iter_mut().zip(&wrong) {
            if bad {
                *w *= boost;
            }
            total += *w;
        }
        for w in &mut weights {
            *w /= total;
        }
    }

    Ok(TreeEnsemble {
        kind: EnsembleKind::AdaBoost,
        trees,
        n_classes,
        boost_weights: Some(alphas),
        target: EnsembleTarget::ClassLabels,
    })
}

impl<R: Real> TreeEnsemble<R> {
    /// Predict class labels for every row. Ties break toward the lowest
    /// class index; an ensemble that early-stopped to zero trees predicts
    /// class 0.
    pub fn predict(&self, x: &Matrix<R>) -> Result<Vec<usize>> {
        if self.trees.is_empty() {
            return Ok(vec![0; x.rows()]);
        }
        let mut out = Vec::with_capacity(x.rows());
        for row in x.iter_rows() {
            out.push(self.predict_row(row));
        }
        Ok(out)
    }

    pub fn predict_row(&self, row: &[R]) -> usize {
        if self.trees.is_empty() {
            return 0;
        }
        match self.target {
            EnsembleTarget::LabelCodeRegression => {
                let sum: R = self.trees.iter().map(|t| t.predict_value(row)).sum();
                let mean = sum / R::of_usize(self.trees.len());
                let code = mean.round().max(R::zero()).as_f64() as usize;
                code.min(self.n_classes - 1)
            }
            EnsembleTarget::ClassLabels => {
                let mut votes = vec![R::zero(); self.n_classes];
                match &self.boost_weights {
                    Some(alphas) => {
                        for (tree, &a) in self.trees.iter().zip(alphas) {
                            votes[tree.predict_class(row)] += a;
                        }
                    }
                    None => {
                        for tree in &self.trees {
                            votes[tree.predict_class(row)] += R::one();
                        }
                    }
                }
                argmax_tie_low(&votes)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn separable(n: usize) -> (Matrix<f64>, Vec<usize>) {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let c = if i % 2 == 0 { 0.0 } else { 1.0 };
                vec![c + rng.gen::<f64>() * 0.4, rng.gen::<f64>()]
            })
            .collect();
        let y: Vec<usize> = (0..n).map(|i| i % 2).collect();
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn single_class_zero_training_error() {
        let x = Matrix::from_rows(&[vec![1.0f64, 2.0], vec![3.0, 1.0], vec![0.5, 0.1]]).unwrap();
        let y = vec![0usize, 0, 0];
        let et = extra_trees_fit(&x, &y, &ExtraTreesConfig::default(), 1).unwrap();
        assert_eq!(et.predict(&x).unwrap(), y);
        let ada = adaboost_fit(&x, &y, &AdaBoostConfig::default(), 1).unwrap();
        assert_eq!(ada.predict(&x).unwrap(), y);
    }

    #[test]
    fn threshold_separable_extra_trees_zero_error() {
        let (x, y) = separable(60);
        let et = extra_trees_fit(&x, &y, &ExtraTreesConfig::default(), 3).unwrap();
        assert_eq!(et.predict(&x).unwrap(), y);
    }

    #[test]
    fn threshold_separable_adaboost_few_rounds() {
        let (x, y) = separable(60);
        let cfg = AdaBoostConfig { n_rounds: 5, ..AdaBoostConfig::default() };
        let ada = adaboost_fit(&x, &y, &cfg, 3).unwrap();
        assert!(ada.trees.len() <= 5);
        assert_eq!(ada.predict(&x).unwrap(), y);
    }

    #[test]
    fn unlimited_depth_memorizes_distinct_rows() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let rows: Vec<Vec<f64>> =
            (0..50).map(|_| (0..5).map(|_| rng.gen::<f64>()).collect()).collect();
        let y: Vec<usize> = (0..50).map(|_| rng.gen_range(0..3)).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let et = extra_trees_fit(&x, &y, &ExtraTreesConfig::default(), 11).unwrap();
        assert_eq!(et.predict(&x).unwrap(), y, "distinct rows must be memorized");
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let (x, y) = separable(40);
        let a = extra_trees_fit(&x, &y, &ExtraTreesConfig::default(), 9).unwrap();
        let b = extra_trees_fit(&x, &y, &ExtraTreesConfig::default(), 9).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let ada1 = adaboost_fit(&x, &y, &AdaBoostConfig::default(), 9).unwrap();
        let ada2 = adaboost_fit(&x, &y, &AdaBoostConfig::default(), 9).unwrap();
        assert_eq!(serde_json::to_string(&ada1).unwrap(), serde_json::to_string(&ada2).unwrap());
    }

    #[test]
    fn label_code_regression_variant() {
        let (x, y) = separable(60);
        let cfg = ExtraTreesConfig {
            target: EnsembleTarget::LabelCodeRegression,
            ..ExtraTreesConfig::default()
        };
        let et = extra_trees_fit(&x, &y, &cfg, 3).unwrap();
        assert_eq!(et.predict(&x).unwrap(), y);
    }

    #[test]
    fn empty_training_set_rejected() {
        let x = Matrix::<f64>::zeros(0, 3);
        assert!(extra_trees_fit(&x, &[], &ExtraTreesConfig::default(), 0).is_err());
        assert!(adaboost_fit(&x, &[], &AdaBoostConfig::default(), 0).is_err());
    }

    #[test]
    fn three_class_boosting_improves_over_one_round() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let rows: Vec<Vec<f64>> = (0..240)
            .map(|i| {
                let c = (i % 3) as f64;
                vec![c * 2.0 + rng.gen::<f64>(), rng.gen::<f64>() + (c * 0.5)]
            })
            .collect();
        let y: Vec<usize> = (0..240).map(|i| i % 3).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let one = adaboost_fit(&x, &y, &AdaBoostConfig { n_rounds: 1, max_depth: 1, ..AdaBoostConfig::default() }, 2).unwrap();
        let many = adaboost_fit(&x, &y, &AdaBoostConfig { n_rounds: 40, max_depth: 1, ..AdaBoostConfig::default() }, 2).unwrap();
        let err = |pred: Vec<usize>| {
            pred.iter().zip(&y).filter(|(a, b)| a != b).count() as f64 / y.len() as f64
        };
        let e1 = err(one.predict(&x).unwrap());
        let em = err(many.predict(&x).unwrap());
        assert!(em <= e1, "boosting got worse: {em} > {e1}");
        assert!(em < 0.15, "boosted stumps should fit this: {em}");
    }
}
