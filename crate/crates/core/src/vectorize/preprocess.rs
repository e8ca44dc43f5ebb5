//! Feature-matrix preprocessing (near-zero-variance removal plus
//! standardization) and principal component analysis.

use crate::error::{Error, Result};
use crate::linalg;

use super::FeatureMatrix;

const VARIANCE_CUTOFF: f64 = 1e-12;

/// A fitted standardization transform: which columns survive and their
/// training mean/standard deviation, replayable on held-out rows.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    pub kept: Vec<usize>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    col_names: Vec<String>,
}

impl Preprocessor {
    /// Fits on a training matrix: drops columns with population variance
    /// below 1e-12 or fewer than two distinct values, and records the
    /// statistics that map the rest to mean 0, variance 1.
    pub fn fit(x: &FeatureMatrix) -> Result<Self> {
        let n = x.n_samples();
        let p = x.n_features();
        if n == 0 {
            return Err(Error::InvalidInput("cannot fit on an empty matrix".into()));
        }
        let mut kept = Vec::new();
        let mut means = Vec::new();
        let mut stds = Vec::new();
        let mut col_names = Vec::new();
        for j in 0..p {
            let mean = (0..n).map(|i| x.get(i, j)).sum::<f64>() / n as f64;
            let var = (0..n).map(|i| sq(x.get(i, j) - mean)).sum::<f64>() / n as f64;
            let distinct = {
                let mut vals: Vec<f64> = (0..n).map(|i| x.get(i, j)).collect();
                vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
                vals.dedup();
                vals.len()
            };
            if var < VARIANCE_CUTOFF || distinct < 2 {
                continue;
            }
            kept.push(j);
            means.push(mean);
            stds.push(var.sqrt());
            col_names.push(x.col_names[j].clone());
        }
        if kept.is_empty() {
            return Err(Error::InvalidInput(
                "every column was constant; nothing to learn from".into(),
            ));
        }
        Ok(Preprocessor {
            kept,
            means,
            stds,
            col_names,
        })
    }

    /// Applies the fitted transform (training statistics, not the new
    /// rows') to any matrix with the same column layout.
    pub fn apply(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        let n = x.n_samples();
        let mut data = Vec::with_capacity(n * self.kept.len());
        for i in 0..n {
            for (slot, &j) in self.kept.iter().enumerate() {
                data.push((x.get(i, j) - self.means[slot]) / self.stds[slot]);
            }
        }
        FeatureMatrix::new(x.sample_ids.clone(), self.col_names.clone(), data)
    }
}

/// A fitted PCA basis.
#[derive(Debug, Clone)]
pub struct PcaModel {
    /// Column means of the training data.
    pub means: Vec<f64>,
    /// Row-major p x k orthonormal component matrix (columns are
    /// components, in order of non-increasing explained variance).
    pub components: Vec<f64>,
    pub explained_variance: Vec<f64>,
    pub p: usize,
    pub k: usize,
}

impl PcaModel {
    /// Projects rows onto the component basis.
    pub fn transform(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        if x.n_features() != self.p {
            return Err(Error::InvalidInput(format!(
                "expected {} features, got {}",
                self.p,
                x.n_features()
            )));
        }
        let n = x.n_samples();
        let mut data = vec![0.0; n * self.k];
        for i in 0..n {
            for c in 0..self.k {
                let mut acc = 0.0;
                for j in 0..self.p {
                    acc += (x.get(i, j) - self.means[j]) * self.components[j * self.k + c];
                }
                data[i * self.k + c] = acc;
            }
        }
        let names = (1..=self.k).map(|c| format!("pc{c}")).collect();
        FeatureMatrix::new(x.sample_ids.clone(), names, data)
    }
}

/// Principal component analysis of a feature matrix: centers the data and
/// projects onto the top `k` covariance eigenvectors. Uses the
/// eigendecomposition of the p x p scatter when `p <= n` and the n x n
/// Gram trick otherwise; requires `k <= min(n - 1, p)`.
pub fn pca(x: &FeatureMatrix, k: usize) -> Result<(FeatureMatrix, PcaModel)> {
    let n = x.n_samples();
    let p = x.n_features();
    if n < 2 {
        return Err(Error::InvalidInput("PCA needs at least two samples".into()));
    }
    if k == 0 || k > p.min(n - 1) {
        return Err(Error::InvalidInput(format!(
            "k = {k} out of range; need 1 <= k <= min(n-1, p) = {}",
            p.min(n - 1)
        )));
    }
    let means: Vec<f64> = (0..p)
        .map(|j| (0..n).map(|i| x.get(i, j)).sum::<f64>() / n as f64)
        .collect();
    let mut centered = Vec::with_capacity(n * p);
    for i in 0..n {
        for j in 0..p {
            centered.push(x.get(i, j) - means[j]);
        }
    }

    let mut components = vec![0.0; p * k];
    let mut explained = vec![0.0; k];
    if p <= n {
        // Scatter matrix X^T X (p x p).
        let mut scatter = vec![0.0; p * p];
        for row in centered.chunks(p) {
            for a in 0..p {
                for b in a..p {
                    scatter[a * p + b] += row[a] * row[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                scatter[a * p + b] = scatter[b * p + a];
            }
        }
        let (eigs, vecs) = linalg::symmetric_eigen(&scatter, p);
        for c in 0..k {
            explained[c] = eigs[c].max(0.0) / (n - 1) as f64;
            for j in 0..p {
                components[j * k + c] = vecs[j * p + c];
            }
        }
    } else {
        // Gram trick: eigenvectors of X X^T (n x n) map to X^T v / |X^T v|.
        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            for l in i..n {
                let dot = linalg::dot(&centered[i * p..(i + 1) * p], &centered[l * p..(l + 1) * p]);
                gram[i * n + l] = dot;
                gram[l * n + i] = dot;
            }
        }
        let (eigs, vecs) = linalg::symmetric_eigen(&gram, n);
        for c in 0..k {
            let lambda = eigs[c].max(0.0);
            explained[c] = lambda / (n - 1) as f64;
            let mut axis = vec![0.0; p];
            for i in 0..n {
                let v = vecs[i * n + c];
                for j in 0..p {
                    axis[j] += v * centered[i * p + j];
                }
            }
            let norm = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-300 {
                for j in 0..p {
                    components[j * k + c] = axis[j] / norm;
                }
            }
        }
    }
    let model = PcaModel {
        means,
        components,
        explained_variance: explained,
        p,
        k,
    };
    let scores = model.transform(x)?;
    Ok((scores, model))
}

fn sq(v: f64) -> f64 {
    v * v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: Vec<Vec<f64>>) -> FeatureMatrix {
        let p = rows[0].len();
        FeatureMatrix::from_rows(
            (0..rows.len()).map(|i| format!("s{i}")).collect(),
            (0..p).map(|j| format!("f{j}")).collect(),
            rows,
        )
        .unwrap()
    }

    #[test]
    fn constant_columns_dropped_and_standardized() {
        let x = matrix(vec![
            vec![1.0, 5.0, 2.0],
            vec![2.0, 5.0, 4.0],
            vec![3.0, 5.0, 6.0],
        ]);
        let prep = Preprocessor::fit(&x).unwrap();
        assert_eq!(prep.kept, vec![0, 2]);
        let z = prep.apply(&x).unwrap();
        for j in 0..2 {
            let mean: f64 = (0..3).map(|i| z.get(i, j)).sum::<f64>() / 3.0;
            let var: f64 = (0..3).map(|i| sq(z.get(i, j) - mean)).sum::<f64>() / 3.0;
            assert!(mean.abs() < 1e-12);
            assert!((var - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn replay_uses_training_statistics() {
        let train = matrix(vec![vec![0.0], vec![2.0]]);
        let prep = Preprocessor::fit(&train).unwrap();
        let test = matrix(vec![vec![4.0]]);
        let z = prep.apply(&test).unwrap();
        // Training mean 1, std 1, so 4 maps to 3.
        assert!((z.get(0, 0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn all_constant_errors() {
        let x = matrix(vec![vec![1.0, 2.0], vec![1.0, 2.0]]);
        assert!(Preprocessor::fit(&x).is_err());
    }

    #[test]
    fn pca_recovers_line() {
        // Points on a line in R^3: one component explains everything.
        let x = matrix(
            (0..10)
                .map(|i| {
                    let t = i as f64;
                    vec![1.0 + 2.0 * t, -t, 0.5 * t]
                })
                .collect(),
        );
        let (scores, model) = pca(&x, 1).unwrap();
        // Reconstruct and compare.
        for i in 0..10 {
            for j in 0..3 {
                let recon = model.means[j] + scores.get(i, 0) * model.components[j];
                assert!((recon - x.get(i, j)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn components_are_orthonormal() {
        let x = matrix(vec![
            vec![1.0, 0.2, -0.5, 2.0],
            vec![0.0, 1.5, 0.5, -1.0],
            vec![2.0, -0.3, 1.0, 0.3],
            vec![-1.0, 0.8, -2.0, 1.1],
            vec![0.5, -1.2, 0.7, 0.9],
        ]);
        let (_, model) = pca(&x, 3).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let dot: f64 = (0..4)
                    .map(|j| model.components[j * 3 + a] * model.components[j * 3 + b])
                    .sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-9, "({a},{b}) -> {dot}");
            }
        }
        // Explained variance is non-increasing.
        for w in model.explained_variance.windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
    }

    #[test]
    fn full_rank_preserves_variance() {
        let x = matrix(vec![
            vec![1.0, 0.0],
            vec![2.0, 1.0],
            vec![3.0, -1.0],
            vec![0.0, 0.5],
        ]);
        let (scores, model) = pca(&x, 2).unwrap();
        let total_before: f64 = (0..2)
            .map(|j| {
                let mean: f64 = (0..4).map(|i| x.get(i, j)).sum::<f64>() / 4.0;
                (0..4).map(|i| sq(x.get(i, j) - mean)).sum::<f64>() / 3.0
            })
            .sum();
        let total_after: f64 = model.explained_variance.iter().sum();
        assert!((total_before - total_after).abs() < 1e-9);
        // Scores reproduce the explained variances.
        for c in 0..2 {
            let var: f64 = (0..4).map(|i| sq(scores.get(i, c))).sum::<f64>() / 3.0;
            assert!((var - model.explained_variance[c]).abs() < 1e-9);
        }
    }

    #[test]
    fn gram_trick_when_wide() {
        // p = 6 > n = 4 exercises the Gram path.
        let x = matrix(vec![
            vec![1.0, 0.0, 2.0, -1.0, 0.5, 0.0],
            vec![0.0, 1.0, -1.0, 2.0, 1.5, 0.2],
            vec![2.0, -1.0, 0.0, 1.0, -0.5, 1.0],
            vec![((7 * 7) % 5) as f64, 2.0, 1.0, 0.0, 0.7, -1.2],
        ]);
        let (scores, model) = pca(&x, 3).unwrap();
        assert_eq!(scores.n_features(), 3);
        // Orthonormality holds through the Gram route too.
        for a in 0..3 {
            for b in 0..3 {
                let dot: f64 = (0..6)
                    .map(|j| model.components[j * 3 + a] * model.components[j * 3 + b])
                    .sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-9);
            }
        }
    }
}
