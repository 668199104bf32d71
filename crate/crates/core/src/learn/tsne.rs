//! tSNE embedding: Gaussian input affinities with per-point bandwidths
//! solved by bisection against the target perplexity, Student-t output
//! kernel, and gradient descent with early exaggeration, momentum and
//! per-coordinate gains.

use crate::error::{Error, Result};
use crate::matrix::{dist_sq, Matrix};
use crate::num::Real;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TsneConfig<R> {
    pub perplexity: R,
    pub n_iter: usize,
    /// `None` selects max(50, n/12), which keeps the descent smooth.
    pub learning_rate: Option<R>,
    pub exaggeration: R,
    pub seed: u64,
}

impl<R: Real> Default for TsneConfig<R> {
    fn default() -> Self {
        Self {
            perplexity: R::of(30.0),
            n_iter: 1000,
            learning_rate: None,
            exaggeration: R::of(12.0),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TsneEmbedding<R> {
    /// n x 2 embedding coordinates.
    pub points: Matrix<R>,
    pub final_kl: R,
    pub perplexity: R,
    /// KL divergence (against the un-exaggerated affinities) after every
    /// gradient step.
    pub kl_history: Vec<R>,
    /// Number of leading iterations run with exaggerated affinities.
    pub exaggeration_iters: usize,
}

/// Entropy and conditional row for one point at precision `beta`.
fn row_entropy<R: Real>(d2: &[R], i: usize, beta: R, p_row: &mut [R]) -> R {
    let mut sum = R::zero();
    let mut dot = R::zero();
    for (j, &d) in d2.iter().enumerate() {
        if j == i {
            p_row[j] = R::zero();
            continue;
        }
        let w = (-beta * d).exp();
        p_row[j] = w;
        sum += w;
        dot += d * w;
    }
    if sum <= R::zero() {
        // All mass collapsed numerically; treat as a uniform row.
        let n = d2.len();
        let u = R::one() / R::of_usize(n - 1);
        for (j, p) in p_row.iter_mut().enumerate() {
            *p = if j == i { R::zero() } else { u };
        }
        return R::of_usize(n - 1).ln();
    }
    for p in p_row.iter_mut() {
        *p /= sum;
    }
    sum.ln() + beta * dot / sum
}

/// Solve the symmetrized affinity matrix for the given perplexity.
fn input_affinities<R: Real>(x: &Matrix<R>, perplexity: R) -> Matrix<R> {
    let n = x.rows();
    let target = perplexity.ln();
    let mut p = Matrix::zeros(n, n);
    let mut d2_row = vec![R::zero(); n];
    let mut p_row = vec![R::zero(); n];

    for i in 0..n {
        for j in 0..n {
            d2_row[j] = if i == j { R::zero() } else { dist_sq(x.row(i), x.row(j)) };
        }
        let mut beta = R::one();
        let mut lo = R::zero();
        let mut hi = R::infinity();
        for _ in 0..64 {
            let h = row_entropy(&d2_row, i, beta, &mut p_row);
            let diff = h - target;
            if diff.abs() < R::of(1e-7) {
                break;
            }
            if diff > R::zero() {
                lo = beta;
                beta = if hi.is_infinite() { beta * R::of(2.0) } else { (beta + hi) * R::of(0.5) };
            } else {
                hi = beta;
                beta = (beta + lo) * R::of(0.5);
            }
        }
        p.row_mut(i).copy_from_slice(&p_row);
    }

    // Symmetrize and normalize to a joint distribution.
    let mut joint = Matrix::zeros(n, n);
    let denom = R::of(2.0) * R::of_usize(n);
    for i in 0..n {
        for j in 0..n {
            let v = (p.get(i, j) + p.get(j, i)) / denom;
            joint.set(i, j, v.max(R::of(1e-12)));
        }
    }
    for i in 0..n {
        joint.set(i, i, R::zero());
    }
    joint
}

/// Embed rows of `x` into 2D.
pub fn tsne_embed<R: Real>(x: &Matrix<R>, config: &TsneConfig<R>) -> Result<TsneEmbedding<R>> {
    let n = x.rows();
    if n < 4 {
        return Err(Error::data("tsne needs at least 4 rows"));
    }
    if config.perplexity < R::one()
        || config.perplexity >= R::of_usize(n - 1) / R::of(3.0)
    {
        return Err(Error::Data(format!(
            "perplexity {} outside [1, (rows - 1) / 3) for {n} rows",
            config.perplexity
        )));
    }
    if config.n_iter == 0 {
        return Err(Error::config("n_iter must be at least 1"));
    }

    let p = input_affinities(x, config.perplexity);
    let exaggeration_iters = (config.n_iter / 4).min(250);
    let lr = config
        .learning_rate
        .unwrap_or_else(|| (R::of_usize(n) / R::of(12.0)).max(R::of(50.0)));

    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut y = Matrix::zeros(n, 2);
    for i in 0..n {
        for c in 0..2 {
            let z: f64 = StandardNormal.sample(&mut rng);
            y.set(i, c, R::of(z * 1e-4));
        }
    }

    let mut inc = Matrix::zeros(n, 2);
    let mut gains = Matrix::zeros(n, 2);
    for i in 0..n {
        for c in 0..2 {
            gains.set(i, c, R::one());
        }
    }

    let mut w = Matrix::zeros(n, n);
    let mut grad = Matrix::zeros(n, 2);
    let mut kl_history = Vec::with_capacity(config.n_iter);

    for iter in 0..config.n_iter {
        let exaggerating = iter < exaggeration_iters;
        let exag = if exaggerating { config.exaggeration } else { R::one() };
        let momentum = if exaggerating { R::of(0.5) } else { R::of(0.8) };

        // Student-t kernel weights and their normalization.
        let mut w_sum = R::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dist_sq(y.row(i), y.row(j));
                let v = R::one() / (R::one() + d);
                w.set(i, j, v);
                w.set(j, i, v);
                w_sum += v + v;
            }
        }
        let w_sum = w_sum.max(R::of(1e-12));

        // Gradient of the KL divergence.
        for i in 0..n {
            let mut gx = R::zero();
            let mut gy = R::zero();
            for j in 0..n {
                if j == i {
                    continue;
                }
                let wij = w.get(i, j);
                let q = (wij / w_sum).max(R::of(1e-12));
                let coeff = (exag * p.get(i, j) - q) * wij;
                gx += coeff * (y.get(i, 0) - y.get(j, 0));
                gy += coeff * (y.get(i, 1) - y.get(j, 1));
            }
            grad.set(i, 0, gx * R::of(4.0));
            grad.set(i, 1, gy * R::of(4.0));
        }

        // Gains + momentum update, then recenter.
        for i in 0..n {
            for c in 0..2 {
                let g = grad.get(i, c);
                let old_inc = inc.get(i, c);
                let mut gain = gains.get(i, c);
                gain = if (g > R::zero()) != (old_inc > R::zero()) {
                    gain + R::of(0.2)
                } else {
                    gain * R::of(0.8)
                };
                gain = gain.max(R::of(0.01));
                gains.set(i, c, gain);
                let step = momentum * old_inc - lr * gain * g;
                inc.set(i, c, step);
                y.set(i, c, y.get(i, c) + step);
            }
        }
        let mean = y.col_means();
        for i in 0..n {
            y.set(i, 0, y.get(i, 0) - mean[0]);
            y.set(i, 1, y.get(i, 1) - mean[1]);
        }

        // KL against the true (un-exaggerated) affinities.
        let mut kl = R::zero();
        let mut w_sum2 = R::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dist_sq(y.row(i), y.row(j));
                let v = R::one() / (R::one() + d);
                w.set(i, j, v);
                w.set(j, i, v);
                w_sum2 += v + v;
            }
        }
        let w_sum2 = w_sum2.max(R::of(1e-12));
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let pij = p.get(i, j);
                if pij > R::zero() {
                    let q = (w.get(i, j) / w_sum2).max(R::of(1e-12));
                    kl += pij * (pij / q).ln();
                }
            }
        }
        kl_history.push(kl);
    }

    let final_kl = *kl_history.last().expect("at least one iteration");
    Ok(TsneEmbedding {
        points: y,
        final_kl,
        perplexity: config.perplexity,
        kl_history,
        exaggeration_iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn two_blobs(n_per: usize, dim: usize, sep: f64, seed: u64) -> (Matrix<f64>, Vec<usize>) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for b in 0..2 {
            for _ in 0..n_per {
                let mut row = vec![0.0f64; dim];
                for v in row.iter_mut() {
                    *v = rng.gen::<f64>() * 0.5 + b as f64 * sep;
                }
                rows.push(row);
                labels.push(b);
            }
        }
        (Matrix::from_rows(&rows).unwrap(), labels)
    }

    #[test]
    fn far_blobs_embed_disjointly() {
        let (x, labels) = two_blobs(50, 8, 40.0, 3);
        let cfg = TsneConfig { perplexity: 10.0, n_iter: 600, seed: 1, ..TsneConfig::default() };
        let emb = tsne_embed(&x, &cfg).unwrap();
        let mut max_intra = 0.0f64;
        let mut min_inter = f64::INFINITY;
        for i in 0..x.rows() {
            for j in (i + 1)..x.rows() {
                let d = dist_sq(emb.points.row(i), emb.points.row(j)).sqrt();
                if labels[i] == labels[j] {
                    max_intra = max_intra.max(d);
                } else {
                    min_inter = min_inter.min(d);
                }
            }
        }
        assert!(
            max_intra < min_inter,
            "blobs overlap in the embedding: intra {max_intra} vs inter {min_inter}"
        );
    }

    #[test]
    fn duplicates_land_together() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let mut rows: Vec<Vec<f64>> =
            (0..18).map(|_| (0..5).map(|_| rng.gen::<f64>() * 10.0).collect()).collect();
        rows.push(rows[0].clone()); // exact duplicate of point 0
        let x = Matrix::from_rows(&rows).unwrap();
        let cfg = TsneConfig { perplexity: 5.0, n_iter: 500, seed: 2, ..TsneConfig::default() };
        let emb = tsne_embed(&x, &cfg).unwrap();
        let twin = dist_sq(emb.points.row(0), emb.points.row(18)).sqrt();
        let mut diameter = 0.0f64;
        for i in 0..x.rows() {
            for j in (i + 1)..x.rows() {
                diameter = diameter.max(dist_sq(emb.points.row(i), emb.points.row(j)).sqrt());
            }
        }
        assert!(twin < diameter * 0.01, "duplicates split: {twin} vs diameter {diameter}");
    }

    #[test]
    fn kl_descends_after_exaggeration() {
        let (x, _) = two_blobs(40, 6, 10.0, 7);
        let cfg = TsneConfig { perplexity: 12.0, n_iter: 500, seed: 3, ..TsneConfig::default() };
        let emb = tsne_embed(&x, &cfg).unwrap();
        assert_eq!(emb.kl_history.len(), 500);
        let after = &emb.kl_history[emb.exaggeration_iters..];
        for w in after.windows(2) {
            assert!(w[1] <= w[0] + 1e-3, "KL rose by {}", w[1] - w[0]);
        }
        assert!(emb.final_kl <= emb.kl_history[emb.exaggeration_iters] + 1e-9);
        assert!(emb.final_kl >= 0.0);
    }

    #[test]
    fn rejects_invalid_perplexity() {
        let (x, _) = two_blobs(10, 3, 5.0, 1);
        let bad = TsneConfig { perplexity: 7.0, ..TsneConfig::default() }; // (20-1)/3 = 6.33
        assert!(tsne_embed(&x, &bad).is_err());
        let tiny = Matrix::from_rows(&[vec![0.0f64], vec![1.0], vec![2.0]]).unwrap();
        assert!(tsne_embed(&tiny, &TsneConfig::default()).is_err());
    }

    #[test]
    fn seeded_runs_are_identical() {
        let (x, _) = two_blobs(15, 4, 8.0, 9);
        let cfg = TsneConfig { perplexity: 8.0, n_iter: 120, seed: 42, ..TsneConfig::default() };
        let a = tsne_embed(&x, &cfg).unwrap();
        let b = tsne_embed(&x, &cfg).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.final_kl, b.final_kl);
    }
}
