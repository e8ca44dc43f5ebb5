//! Small dense linear-algebra helpers shared by PCA and the Gram-matrix
//! diagnostics. Everything here works on row-major `Vec<f64>` buffers; the
//! matrices involved are at most a few thousand rows, so a cyclic Jacobi
//! sweep is accurate enough and keeps the crate dependency-free.

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` sorted by descending eigenvalue;
/// eigenvector `k` is stored as column `k` of the returned row-major matrix.
pub fn symmetric_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = identity(n);
    if n <= 1 {
        return (m, v);
    }

    let off = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += m[i * n + j] * m[i * n + j];
            }
        }
        s
    };
    let scale: f64 = (0..n).map(|i| m[i * n + i].abs()).fold(1e-300, f64::max);
    let tol = (1e-14 * scale).powi(2) * (n * n) as f64;

    for _sweep in 0..100 {
        if off(&m) <= tol {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Rotate rows/columns p and q of m.
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[j * n + j]
            .partial_cmp(&m[i * n + i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    let mut eigenvectors = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors[row * n + new_col] = v[row * n + old_col];
        }
    }
    (eigenvalues, eigenvectors)
}

/// Smallest eigenvalue of a symmetric matrix.
///
/// Uses the full Jacobi solve up to `n = 2000` and a shifted power
/// iteration beyond that (estimate the largest eigenvalue of `A`, then of
/// `lambda_max I - A`).
pub fn min_eigenvalue_symmetric(a: &[f64], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n <= 2000 {
        let (eigs, _) = symmetric_eigen(a, n);
        return *eigs.last().unwrap();
    }
    let lambda_max = power_iteration_max(a, n);
    let shift = lambda_max.abs() + 1.0;
    let mut shifted = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            shifted[i * n + j] = -a[i * n + j];
        }
        shifted[i * n + i] += shift;
    }
    shift - power_iteration_max(&shifted, n)
}

fn power_iteration_max(a: &[f64], n: usize) -> f64 {
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.37).sin()).collect();
    normalize(&mut x);
    let mut lambda = 0.0;
    for _ in 0..500 {
        let y = mat_vec(a, n, &x);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return 0.0;
        }
        let next: Vec<f64> = y.iter().map(|v| v / norm).collect();
        let new_lambda: f64 = dot(&next, &mat_vec(a, n, &next));
        let done = (new_lambda - lambda).abs() <= 1e-12 * new_lambda.abs().max(1.0);
        lambda = new_lambda;
        x = next;
        if done {
            break;
        }
    }
    lambda
}

pub fn mat_vec(a: &[f64], n: usize, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        let row = &a[i * n..(i + 1) * n];
        y[i] = dot(row, x);
    }
    y
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in x {
            *v /= norm;
        }
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}
