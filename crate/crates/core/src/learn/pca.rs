//! Principal component analysis via eigendecomposition of the sample
//! covariance, solved with a cyclic Jacobi rotation sweep.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::num::Real;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PcaModel<R> {
    pub mean: Vec<R>,
    /// Component rows, orthonormal, sorted by decreasing variance.
    pub components: Matrix<R>,
    /// Eigenvalues of the sample covariance for the kept components.
    pub explained_variance: Vec<R>,
    /// Eigenvalue share of the total variance, non-increasing, sum <= 1.
    pub explained_variance_ratio: Vec<R>,
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Returns
/// (eigenvalues, eigenvectors as columns), unsorted.
pub fn jacobi_eigen<R: Real>(a: &Matrix<R>) -> (Vec<R>, Matrix<R>) {
    let n = a.rows();
    assert_eq!(n, a.cols(), "jacobi_eigen needs a square matrix");
    let mut m = a.clone();
    let mut v = Matrix::zeros(n, n);
    for i in 0..n {
        v.set(i, i, R::one());
    }

    let off_norm = |m: &Matrix<R>| {
        let mut s = R::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                s += m.get(i, j) * m.get(i, j);
            }
        }
        s
    };
    let frob: R = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| a.get(i, j) * a.get(i, j))
        .sum();
    let tol = (frob + R::of(1e-300)) * R::of(1e-28);

    for _sweep in 0..64 {
        if off_norm(&m) <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() <= R::of(1e-300) {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (R::of(2.0) * apq);
                // Stable rotation: t = sign(theta) / (|theta| + sqrt(theta^2 + 1)).
                let t = {
                    let s = if theta >= R::zero() { R::one() } else { -R::one() };
                    s / (theta.abs() + (theta * theta + R::one()).sqrt())
                };
                let c = R::one() / (t * t + R::one()).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = m.get(p, k);
                    let aqk = m.get(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let eigvals = (0..n).map(|i| m.get(i, i)).collect();
    (eigvals, v)
}

/// Sample covariance of the centered data, (n-1) denominator.
fn covariance<R: Real>(x: &Matrix<R>, mean: &[R]) -> Matrix<R> {
    let d = x.cols();
    let mut cov = Matrix::zeros(d, d);
    for row in x.iter_rows() {
        for i in 0..d {
            let di = row[i] - mean[i];
            for j in i..d {
                let v = cov.get(i, j) + di * (row[j] - mean[j]);
                cov.set(i, j, v);
            }
        }
    }
    let denom = R::of_usize(x.rows() - 1);
    for i in 0..d {
        for j in i..d {
            let v = cov.get(i, j) / denom;
            cov.set(i, j, v);
            cov.set(j, i, v);
        }
    }
    cov
}

/// Fit a PCA with `n_components` directions. Component signs are fixed so
/// the entry of largest magnitude in each component is positive.
pub fn pca_fit<R: Real>(x: &Matrix<R>, n_components: usize) -> Result<PcaModel<R>> {
    if x.rows() < 2 {
        return Err(Error::data("pca needs at least 2 rows"));
    }
    let max_n = x.rows().min(x.cols());
    if n_components == 0 || n_components > max_n {
        return Err(Error::Data(format!(
            "n_components {} outside [1, min(rows, dim)] = [1, {}]",
            n_components, max_n
        )));
    }

    let mean = x.col_means();
    let cov = covariance(x, &mean);
    let (eigvals, eigvecs) = jacobi_eigen(&cov);

    let d = x.cols();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eigvals[b].partial_cmp(&eigvals[a]).expect("finite eigenvalues"));

    let total: R = eigvals.iter().map(|&l| l.max(R::zero())).sum();
    let total = if total > R::zero() { total } else { R::one() };

    let mut components = Matrix::zeros(n_components, d);
    let mut explained_variance = Vec::with_capacity(n_components);
    let mut explained_variance_ratio = Vec::with_capacity(n_components);
    for (row, &col) in order.iter().take(n_components).enumerate() {
        let mut comp: Vec<R> = (0..d).map(|i| eigvecs.get(i, col)).collect();
        // Deterministic sign: largest-magnitude entry positive.
        let mut arg = 0;
        for (i, c) in comp.iter().enumerate() {
            if c.abs() > comp[arg].abs() {
                arg = i;
            }
        }
        if comp[arg] < R::zero() {
            for c in &mut comp {
                *c = -*c;
            }
        }
        for (j, &c) in comp.iter().enumerate() {
            components.set(row, j, c);
        }
        let l = eigvals[col].max(R::zero());
        explained_variance.push(l);
        explained_variance_ratio.push(l / total);
    }

    Ok(PcaModel { mean, components, explained_variance, explained_variance_ratio })
}

/// Project rows onto the model's components: `(x - mean) . components^T`.
pub fn pca_transform<R: Real>(model: &PcaModel<R>, x: &Matrix<R>) -> Result<Matrix<R>> {
    if x.cols() != model.mean.len() {
        return Err(Error::Dimension { expected: model.mean.len(), actual: x.cols() });
    }
    let k = model.components.rows();
    let mut out = Matrix::zeros(x.rows(), k);
    for (r, row) in x.iter_rows().enumerate() {
        for c in 0..k {
            let comp = model.components.row(c);
            let mut acc = R::zero();
            for j in 0..row.len() {
                acc += (row[j] - model.mean[j]) * comp[j];
            }
            out.set(r, c, acc);
        }
    }
    Ok(out)
}

/// Reconstruct rows from their projection: `mean + y . components`.
pub fn pca_inverse_transform<R: Real>(model: &PcaModel<R>, y: &Matrix<R>) -> Result<Matrix<R>> {
    let k = model.components.rows();
    if y.cols() != k {
        return Err(Error::Dimension { expected: k, actual: y.cols() });
    }
    let d = model.mean.len();
    let mut out = Matrix::zeros(y.rows(), d);
    for r in 0..y.rows() {
        let proj = y.row(r);
        let row = out.row_mut(r);
        row.copy_from_slice(&model.mean);
        for c in 0..k {
            let comp = model.components.row(c);
            for j in 0..d {
                row[j] += proj[c] * comp[j];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_matrix(rng: &mut ChaCha12Rng, rows: usize, cols: usize) -> Matrix<f64> {
        let mut m = Matrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                // Per-column scale spreads the spectrum.
                let scale = 1.0 / (1.0 + c as f64 * 0.15);
                m.set(r, c, (rng.gen::<f64>() - 0.5) * scale);
            }
        }
        m
    }

    #[test]
    fn rank_one_data_has_unit_leading_ratio() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let dir = [0.2, -0.4, 0.1, 0.7, 0.5];
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| {
                let t: f64 = rng.gen::<f64>() * 4.0 - 2.0;
                dir.iter().map(|d| d * t).collect()
            })
            .collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let model = pca_fit(&x, 1).unwrap();
        assert!((model.explained_variance_ratio[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn full_rank_projection_reconstructs_exactly() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let x = random_matrix(&mut rng, 100, 24);
        let model = pca_fit(&x, 24).unwrap();
        let y = pca_transform(&model, &x).unwrap();
        let back = pca_inverse_transform(&model, &y).unwrap();
        for r in 0..x.rows() {
            for c in 0..x.cols() {
                assert!((back.get(r, c) - x.get(r, c)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn components_are_orthonormal_and_ratios_nonincreasing() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let x = random_matrix(&mut rng, 120, 10);
        let model = pca_fit(&x, 6).unwrap();
        for i in 0..6 {
            let ci = model.components.row(i);
            for j in 0..6 {
                let cj = model.components.row(j);
                let dot: f64 = ci.iter().zip(cj).map(|(a, b)| a * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-8, "dot({i},{j}) = {dot}");
            }
        }
        for w in model.explained_variance_ratio.windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
        let sum: f64 = model.explained_variance_ratio.iter().sum();
        assert!(sum <= 1.0 + 1e-9);
    }

    #[test]
    fn transformed_training_variance_equals_eigenvalues() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let x = random_matrix(&mut rng, 200, 12);
        let model = pca_fit(&x, 5).unwrap();
        let y = pca_transform(&model, &x).unwrap();
        for c in 0..5 {
            let mean: f64 = (0..y.rows()).map(|r| y.get(r, c)).sum::<f64>() / y.rows() as f64;
            let var: f64 = (0..y.rows()).map(|r| (y.get(r, c) - mean).powi(2)).sum::<f64>()
                / (y.rows() - 1) as f64;
            let rel = (var - model.explained_variance[c]).abs()
                / model.explained_variance[c].max(1e-30);
            assert!(rel < 1e-6, "component {c}: var {var} vs {}", model.explained_variance[c]);
        }
    }

    #[test]
    fn rejects_too_many_components_and_tiny_input() {
        let x = Matrix::from_rows(&[vec![1.0f64, 2.0], vec![3.0, 4.0], vec![5.0, 6.5]]).unwrap();
        assert!(pca_fit(&x, 3).is_err());
        assert!(pca_fit(&x, 0).is_err());
        let one = Matrix::from_rows(&[vec![1.0f64, 2.0]]).unwrap();
        assert!(pca_fit(&one, 1).is_err());
    }

    #[test]
    fn jacobi_solves_known_eigensystem() {
        // [[2, 1], [1, 2]] has eigenvalues 3 and 1.
        let a = Matrix::from_rows(&[vec![2.0f64, 1.0], vec![1.0, 2.0]]).unwrap();
        let (mut vals, _) = jacobi_eigen(&a);
        vals.sort_by(|x, y| y.partial_cmp(x).unwrap());
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
    }
}
