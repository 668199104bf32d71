//! K-means clustering (Lloyd iterations, k-means++ seeding, restarts) and
//! elbow-based selection of K.

use crate::error::{Error, Result};
use crate::matrix::{dist_sq, Matrix};
use crate::num::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KMeansModel<R> {
    pub centroids: Matrix<R>,
    /// Within-cluster sum of squared distances of the training data.
    pub inertia: R,
    pub n_iter: usize,
    /// Assignment-step inertia of the winning restart, one value per
    /// iteration; non-increasing by construction of Lloyd's algorithm.
    pub inertia_history: Vec<R>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct KMeansConfig {
    pub max_iter: usize,
    pub n_restarts: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self { max_iter: 100, n_restarts: 10 }
    }
}

/// Nearest-centroid assignment, ties to the lowest centroid index.
pub fn kmeans_assign<R: Real>(model: &KMeansModel<R>, x: &Matrix<R>) -> Result<Vec<usize>> {
    if x.cols() != model.centroids.cols() {
        return Err(Error::Dimension { expected: model.centroids.cols(), actual: x.cols() });
    }
    Ok(x.iter_rows().map(|row| nearest(&model.centroids, row).0).collect())
}

fn nearest<R: Real>(centroids: &Matrix<R>, row: &[R]) -> (usize, R) {
    let mut best = (0usize, R::infinity());
    for (k, c) in centroids.iter_rows().enumerate() {
        let d = dist_sq(row, c);
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

fn plus_plus_init<R: Real>(x: &Matrix<R>, k: usize, rng: &mut ChaCha12Rng) -> Matrix<R> {
    let n = x.rows();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    chosen.push(rng.gen_range(0..n));

    let mut d2: Vec<R> = (0..n).map(|i| dist_sq(x.row(i), x.row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: R = d2.iter().copied().sum();
        let next = if total > R::zero() {
            // Sample proportionally to the squared distance to the nearest
            // chosen center.
            let mut target = R::of(rng.gen::<f64>()) * total;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            // All points coincide with a center; take the first unchosen.
            (0..n).find(|i| !chosen.contains(i)).unwrap_or(0)
        };
        chosen.push(next);
        for i in 0..n {
            d2[i] = d2[i].min(dist_sq(x.row(i), x.row(next)));
        }
    }

    let mut c = Matrix::zeros(k, x.cols());
    for (row, &i) in chosen.iter().enumerate() {
        c.row_mut(row).copy_from_slice(x.row(i));
    }
    c
}

fn lloyd<R: Real>(
    x: &Matrix<R>,
    mut centroids: Matrix<R>,
    max_iter: usize,
) -> (Matrix<R>, Vec<usize>, R, usize, Vec<R>) {
    let n = x.rows();
    let k = centroids.rows();
    let mut labels = vec![0usize; n];
    let mut history = Vec::new();
    let mut n_iter = 0;

    for iter in 0..max_iter {
        n_iter = iter + 1;
        let mut inertia = R::zero();
        let mut changed = false;
        for (i, row) in x.iter_rows().enumerate() {
            let (best, d) = nearest(&centroids, row);
            inertia += d;
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        history.push(inertia);
        if !changed && iter > 0 {
            break;
        }

        // Recenter.
        let mut sums = Matrix::zeros(k, x.cols());
        let mut counts = vec![0usize; k];
        for (i, row) in x.iter_rows().enumerate() {
            counts[labels[i]] += 1;
            let acc = sums.row_mut(labels[i]);
            for (a, &v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let inv = R::one() / R::of_usize(counts[c]);
                for v in sums.row_mut(c) {
                    *v *= inv;
                }
                centroids.row_mut(c).copy_from_slice(sums.row(c));
            } else {
                // Empty cluster: re-seed at the point farthest from its
                // centroid (deterministic, ties to the lowest index).
                let mut far = (0usize, R::neg_infinity());
                for (i, row) in x.iter_rows().enumerate() {
                    let d = dist_sq(row, centroids.row(labels[i]));
                    if d > far.1 {
                        far = (i, d);
                    }
                }
                centroids.row_mut(c).copy_from_slice(x.row(far.0));
            }
        }
    }

    // Final assignment inertia for the returned centroids.
    let mut inertia = R::zero();
    for (i, row) in x.iter_rows().enumerate() {
        let (best, d) = nearest(&centroids, row);
        labels[i] = best;
        inertia += d;
    }
    (centroids, labels, inertia, n_iter, history)
}

/// Fit K-means: k-means++ seeding, Lloyd iterations, best of `n_restarts`
/// by final inertia (ties to the earliest restart).
pub fn kmeans_fit<R: Real>(
    x: &Matrix<R>,
    k: usize,
    seed: u64,
    config: &KMeansConfig,
) -> Result<KMeansModel<R>> {
    if k == 0 {
        return Err(Error::config("k must be at least 1"));
    }
    if x.rows() < k {
        return Err(Error::Data(format!("{} rows cannot support k = {k}", x.rows())));
    }
    if config.max_iter == 0 || config.n_restarts == 0 {
        return Err(Error::config("max_iter and n_restarts must be at least 1"));
    }

    let mut best: Option<KMeansModel<R>> = None;
    for restart in 0..config.n_restarts {
        let mut rng = ChaCha12Rng::seed_from_u64(
            seed ^ (restart as u64).wrapping_mul(0xA076_1D64_78BD_642F),
        );
        let init = plus_plus_init(x, k, &mut rng);
        let (centroids, _, inertia, n_iter, history) = lloyd(x, init, config.max_iter);
        if best.as_ref().map_or(true, |b| inertia < b.inertia) {
            best = Some(KMeansModel { centroids, inertia, n_iter, inertia_history: history });
        }
    }
    Ok(best.expect("at least one restart ran"))
}

/// Elbow selection result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElbowResult<R> {
    pub k: usize,
    /// (k, inertia) pairs over the requested range, for plotting.
    pub curve: Vec<(usize, R)>,
    /// Set when no clear knee exists and `k` fell back to the range minimum.
    pub degenerate: bool,
}

/// Pick K by the discrete second difference of the inertia curve. The knee
/// must dominate the remaining curvature by `KNEE_DOMINANCE`; otherwise the
/// curve is declared degenerate and the range minimum is returned with the
/// flag set.
pub fn elbow_select<R: Real>(
    x: &Matrix<R>,
    k_min: usize,
    k_max: usize,
    seed: u64,
    config: &KMeansConfig,
) -> Result<ElbowResult<R>> {
    const KNEE_DOMINANCE: f64 = 20.0;

    if k_min == 0 || k_max < k_min {
        return Err(Error::config("need 1 <= k_min <= k_max"));
    }
    if k_max > x.rows() {
        return Err(Error::Data(format!("k_max {} exceeds {} rows", k_max, x.rows())));
    }

    let mut curve = Vec::with_capacity(k_max - k_min + 1);
    for k in k_min..=k_max {
        let model = kmeans_fit(x, k, seed ^ (k as u64) << 32, config)?;
        curve.push((k, model.inertia));
    }

    if curve.len() < 3 {
        return Ok(ElbowResult { k: k_min, curve, degenerate: false });
    }

    // Flat curve (e.g. identical points): no structure at all.
    let scale = curve[0].1;
    if scale <= R::zero() || (curve[0].1 - curve.last().unwrap().1) <= scale * R::of(1e-12) {
        return Ok(ElbowResult { k: k_min, curve, degenerate: true });
    }

    let mut best: Option<(usize, R)> = None;
    let mut second = R::zero();
    for i in 1..curve.len() - 1 {
        let d2 = curve[i - 1].1 - R::of(2.0) * curve[i].1 + curve[i + 1].1;
        match best {
            Some((_, b)) if d2 <= b => second = second.max(d2),
            _ => {
                if let Some((_, b)) = best {
                    second = second.max(b);
                }
                best = Some((curve[i].0, d2));
            }
        }
    }
    let (knee, d2_max) = best.expect("interior points exist");

    if d2_max <= R::zero() {
        return Ok(ElbowResult { k: k_min, curve, degenerate: true });
    }
    // With a single interior point there is nothing to dominate.
    if curve.len() > 3 {
        let floor = scale * R::of(1e-12);
        if d2_max < R::of(KNEE_DOMINANCE) * second.max(floor) {
            return Ok(ElbowResult { k: k_min, curve, degenerate: true });
        }
    }
    Ok(ElbowResult { k: knee, curve, degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn two_masses() -> Matrix<f64> {
        Matrix::from_rows(&[
            vec![0.0, 0.0],
            vec![0.0, 0.0],
            vec![10.0, 0.0],
            vec![10.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn two_point_masses_zero_inertia() {
        let x = two_masses();
        let model = kmeans_fit(&x, 2, 1, &KMeansConfig::default()).unwrap();
        assert!(model.inertia < 1e-24);
        let mut cents: Vec<f64> = model.centroids.iter_rows().map(|r| r[0]).collect();
        cents.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(cents, vec![0.0, 10.0]);
    }

    #[test]
    fn k_equals_rows_zero_inertia() {
        let x = Matrix::from_rows(&[vec![1.0f64, 2.0], vec![3.0, 4.0], vec![9.0, 0.5]]).unwrap();
        let model = kmeans_fit(&x, 3, 7, &KMeansConfig::default()).unwrap();
        assert!(model.inertia < 1e-24);
    }

    /// Exhaustive 2-partition optimum for small instances.
    fn brute_force_k2(x: &Matrix<f64>) -> f64 {
        let n = x.rows();
        let d = x.cols();
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << (n - 1)) {
            let mut sums = [vec![0.0f64; d], vec![0.0f64; d]];
            let mut counts = [0usize; 2];
            for i in 0..n {
                let side = ((mask >> i) & 1) as usize;
                counts[side] += 1;
                for j in 0..d {
                    sums[side][j] += x.get(i, j);
                }
            }
            if counts[0] == 0 || counts[1] == 0 {
                continue;
            }
            let mut cost = 0.0;
            for i in 0..n {
                let side = ((mask >> i) & 1) as usize;
                for j in 0..d {
                    let c = sums[side][j] / counts[side] as f64;
                    cost += (x.get(i, j) - c).powi(2);
                }
            }
            best = best.min(cost);
        }
        best
    }

    #[test]
    fn matches_exhaustive_partition_optimum() {
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let cfg = KMeansConfig { max_iter: 100, n_restarts: 32 };
        for case in 0..12 {
            let n = 8 + (case % 7);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.gen::<f64>() * 4.0, rng.gen::<f64>() * 4.0])
                .collect();
            let x = Matrix::from_rows(&rows).unwrap();
            let model = kmeans_fit(&x, 2, case as u64, &cfg).unwrap();
            let opt = brute_force_k2(&x);
            assert!(
                (model.inertia - opt).abs() <= 1e-9 * (1.0 + opt),
                "case {case}: {} vs optimum {opt}",
                model.inertia
            );
        }
    }

    #[test]
    fn inertia_history_is_monotone() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let rows: Vec<Vec<f64>> =
            (0..60).map(|_| vec![rng.gen::<f64>() * 10.0, rng.gen::<f64>() * 10.0]).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let model = kmeans_fit(&x, 4, 3, &KMeansConfig::default()).unwrap();
        for w in model.inertia_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn final_assignment_is_a_fixed_point() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let rows: Vec<Vec<f64>> =
            (0..50).map(|_| vec![rng.gen::<f64>() * 10.0, rng.gen::<f64>() * 10.0]).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let model = kmeans_fit(&x, 3, 3, &KMeansConfig::default()).unwrap();
        let labels = kmeans_assign(&model, &x).unwrap();
        // Recentering on the final assignment changes nothing.
        let (len_d, k) = (x.cols(), 3usize);
        let mut sums = Matrix::zeros(k, len_d);
        let mut counts = vec![0usize; k];
        for (i, row) in x.iter_rows().enumerate() {
            counts[labels[i]] += 1;
            for (a, &v) in sums.row_mut(labels[i]).iter_mut().zip(row) {
                *a += v;
            }
        }
        for c in 0..k {
            for j in 0..len_d {
                let mean = sums.get(c, j) / counts[c] as f64;
                assert!((mean - model.centroids.get(c, j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn assignment_ties_break_low() {
        let x = Matrix::from_rows(&[vec![0.0f64], vec![2.0]]).unwrap();
        let model = KMeansModel {
            centroids: Matrix::from_rows(&[vec![1.0f64], vec![1.0]]).unwrap(),
            inertia: 0.0,
            n_iter: 0,
            inertia_history: vec![],
        };
        assert_eq!(kmeans_assign(&model, &x).unwrap(), vec![0, 0]);
    }

    #[test]
    fn elbow_finds_two_blobs() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let mut rows = Vec::new();
        for _ in 0..40 {
            rows.push(vec![rng.gen::<f64>() * 0.5, rng.gen::<f64>() * 0.5]);
            rows.push(vec![50.0 + rng.gen::<f64>() * 0.5, rng.gen::<f64>() * 0.5]);
        }
        let x = Matrix::from_rows(&rows).unwrap();
        let res = elbow_select(&x, 1, 6, 2, &KMeansConfig::default()).unwrap();
        assert_eq!(res.k, 2);
        assert!(!res.degenerate);
        assert_eq!(res.curve.len(), 6);
    }

    #[test]
    fn elbow_singleton_range() {
        let x = two_masses();
        let res = elbow_select(&x, 3, 3, 2, &KMeansConfig::default()).unwrap();
        assert_eq!(res.k, 3);
        assert!(!res.degenerate);
    }

    #[test]
    fn elbow_uniform_noise_degenerates_to_k_min() {
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let rows: Vec<Vec<f64>> =
            (0..160).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let res = elbow_select(&x, 1, 6, 2, &KMeansConfig::default()).unwrap();
        assert_eq!(res.k, 1);
        assert!(res.degenerate);
    }

    #[test]
    fn rejects_bad_parameters() {
        let x = two_masses();
        assert!(kmeans_fit(&x, 0, 1, &KMeansConfig::default()).is_err());
        assert!(kmeans_fit(&x, 5, 1, &KMeansConfig::default()).is_err());
        assert!(elbow_select(&x, 1, 9, 1, &KMeansConfig::default()).is_err());
    }
}
