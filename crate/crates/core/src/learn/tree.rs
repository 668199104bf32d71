//! Extremely-randomized decision trees with optional sample weights.
//!
//! Splits are chosen the randomized way: draw `k` candidate features, draw
//! one uniform threshold inside each feature's value range at the node, and
//! keep the candidate with the largest weighted impurity decrease. Both the
//! Gini impurity (class targets) and variance (regression targets) are
//! supported so the same builder serves the extra-trees ensemble, the
//! boosted weak learners, and the label-code regression variant.

use crate::matrix::Matrix;
use crate::num::Real;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Node<R> {
    Split { feature: u32, threshold: R, left: u32, right: u32 },
    /// Per-class weight totals (classification) or `[weighted mean]`
    /// (regression).
    Leaf { scores: Vec<R> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecisionTree<R> {
    pub nodes: Vec<Node<R>>,
    /// 0 for regression trees.
    pub n_classes: usize,
}

#[derive(Debug, Clone)]
pub enum TreeTarget<'a, R> {
    Classes { y: &'a [usize], n_classes: usize },
    Regression { y: &'a [R] },
}

#[derive(Debug, Clone)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Candidate features per split; `None` means ceil(sqrt(dim)).
    pub k_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self { max_depth: None, min_samples_split: 2, k_features: None }
    }
}

/// Index of the largest score, ties to the lowest index.
pub fn argmax_tie_low<R: Real>(scores: &[R]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

struct Builder<'a, R: Real> {
    x: &'a Matrix<R>,
    target: &'a TreeTarget<'a, R>,
    weights: &'a [R],
    params: &'a TreeParams,
    nodes: Vec<Node<R>>,
}

impl<'a, R: Real> Builder<'a, R> {
    fn leaf_scores(&self, idx: &[usize]) -> Vec<R> {
        match self.target {
            TreeTarget::Classes { y, n_classes } => {
                let mut scores = vec![R::zero(); *n_classes];
                for &i in idx {
                    scores[y[i]] += self.weights[i];
                }
                scores
            }
            TreeTarget::Regression { y } => {
                let mut sum = R::zero();
                let mut w = R::zero();
                for &i in idx {
                    sum += y[i] * self.weights[i];
                    w += self.weights[i];
                }
                vec![if w > R::zero() { sum / w } else { R::zero() }]
            }
        }
    }

    /// Weighted impurity of a subset: Gini for classes, variance for
    /// regression.
    fn impurity(&self, idx: &[usize]) -> (R, R) {
        let mut w_total = R::zero();
        match self.target {
            TreeTarget::Classes { y, n_classes } => {
                let mut counts = vec![R::zero(); *n_classes];
                for &i in idx {
                    counts[y[i]] += self.weights[i];
                    w_total += self.weights[i];
                }
                if w_total <= R::zero() {
                    return (R::zero(), R::zero());
                }
                let mut sq = R::zero();
                for c in counts {
                    let f = c / w_total;
                    sq += f * f;
                }
                (R::one() - sq, w_total)
            }
            TreeTarget::Regression { y } => {
                let mut sum = R::zero();
                let mut sum2 = R::zero();
                for &i in idx {
                    let w = self.weights[i];
                    sum += y[i] * w;
                    sum2 += y[i] * y[i] * w;
                    w_total += w;
                }
                if w_total <= R::zero() {
                    return (R::zero(), R::zero());
                }
                let mean = sum / w_total;
                ((sum2 / w_total - mean * mean).max(R::zero()), w_total)
            }
        }
    }

    /// Draw a uniform threshold strictly above the node minimum so both
    /// children are nonempty.
    fn draw_threshold(&self, lo: R, hi: R, rng: &mut ChaCha12Rng) -> R {
        let r = R::of(1.0 - rng.gen::<f64>()); // (0, 1]
        let t = lo + r * (hi - lo);
        if t <= lo {
            hi
        } else {
            t
        }
    }

    fn split_candidate(
        &self,
        idx: &[usize],
        feature: usize,
        rng: &mut ChaCha12Rng,
    ) -> Option<(usize, R, R)> {
        let mut lo = R::infinity();
        let mut hi = R::neg_infinity();
        for &i in idx {
            let v = self.x.get(i, feature);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !(hi > lo) {
            return None;
        }
        let threshold = self.draw_threshold(lo, hi, rng);
        let (parent_imp, w_total) = self.impurity(idx);
        let left: Vec<usize> =
            idx.iter().copied().filter(|&i| self.x.get(i, feature) < threshold).collect();
        let right: Vec<usize> =
            idx.iter().copied().filter(|&i| self.x.get(i, feature) >= threshold).collect();
        if left.is_empty() || right.is_empty() {
            return None;
        }
        let (il, wl) = self.impurity(&left);
        let (ir, wr) = self.impurity(&right);
        let gain = parent_imp - (wl / w_total) * il - (wr / w_total) * ir;
        Some((feature, threshold, gain))
    }

    fn build(&mut self, idx: Vec<usize>, depth: usize, rng: &mut ChaCha12Rng) -> u32 {
        let d = self.x.cols();
        let (imp, _) = self.impurity(&idx);
        let depth_done = self.params.max_depth.map_or(false, |m| depth >= m);
        if idx.len() < self.params.min_samples_split || imp <= R::of(1e-12) || depth_done {
            let id = self.nodes.len() as u32;
            self.nodes.push(Node::Leaf { scores: self.leaf_scores(&idx) });
            return id;
        }

        // Partial Fisher-Yates to draw k distinct candidate features.
        let k = self.params.k_features.unwrap_or_else(|| (d as f64).sqrt().ceil() as usize);
        let k = k.clamp(1, d);
        let mut feats: Vec<usize> = (0..d).collect();
        for i in 0..k {
            let j = rng.gen_range(i..d);
            feats.swap(i, j);
        }

        let mut best: Option<(usize, R, R)> = None;
        for &f in feats.iter().take(k) {
            if let Some(cand) = self.split_candidate(&idx, f, rng) {
                if best.as_ref().map_or(true, |b| cand.2 > b.2) {
                    best = Some(cand);
                }
            }
        }
        // The sampled features were all constant on this node; an impure
        // node may still be splittable elsewhere, so scan the rest.
        if best.is_none() {
            for f in feats.iter().skip(k).copied() {
                if let Some(cand) = self.split_candidate(&idx, f, rng) {
                    best = Some(cand);
                    break;
                }
            }
        }

        let (feature, threshold, gain) = match best {
            Some(b) => b,
            None => {
                let id = self.nodes.len() as u32;
                self.nodes.push(Node::Leaf { scores: self.leaf_scores(&idx) });
                return id;
            }
        };
        if gain <= R::zero() && idx.len() > 64 {
            // No measurable progress on a large node: stop instead of
            // splitting noise.
            let id = self.nodes.len() as u32;
            self.nodes.push(Node::Leaf { scores: self.leaf_scores(&idx) });
            return id;
        }

        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.x.get(i, feature) < threshold);

        let id = self.nodes.len() as u32;
        self.nodes.push(Node::Split { feature: feature as u32, threshold, left: 0, right: 0 });
        let left = self.build(left_idx, depth + 1, rng);
        let right = self.build(right_idx, depth + 1, rng);
        if let Node::Split { left: l, right: r, .. } = &mut self.nodes[id as usize] {
            *l = left;
            *r = right;
        }
        id
    }
}

/// Fit one randomized tree on the full index set.
pub fn fit_tree<R: Real>(
    x: &Matrix<R>,
    target: &TreeTarget<R>,
    weights: &[R],
    params: &TreeParams,
    rng: &mut ChaCha12Rng,
) -> DecisionTree<R> {
    assert_eq!(weights.len(), x.rows(), "one weight per row");
    let n_classes = match target {
        TreeTarget::Classes { n_classes, .. } => *n_classes,
        TreeTarget::Regression { .. } => 0,
    };
    let mut b = Builder { x, target, weights, params, nodes: Vec::new() };
    let idx: Vec<usize> = (0..x.rows()).collect();
    b.build(idx, 0, rng);
    DecisionTree { nodes: b.nodes, n_classes }
}

impl<R: Real> DecisionTree<R> {
    /// Leaf scores for one feature row.
    pub fn scores(&self, row: &[R]) -> &[R] {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { scores } => return scores,
                Node::Split { feature, threshold, left, right } => {
                    at = if row[*feature as usize] < *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    /// Predicted class of one row (classification trees).
    pub fn predict_class(&self, row: &[R]) -> usize {
        argmax_tie_low(self.scores(row))
    }

    /// Predicted value of one row (regression trees).
    pub fn predict_value(&self, row: &[R]) -> R {
        self.scores(row)[0]
    }
}
