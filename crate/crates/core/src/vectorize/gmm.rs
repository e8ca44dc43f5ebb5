//! Diagonal-covariance Gaussian mixtures over rotated diagrams and the
//! Fisher-vector encoding (gradient of the corpus log-likelihood with
//! respect to means and standard deviations).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagramSet;

use super::rotated_points;

const VARIANCE_FLOOR: f64 = 1e-6;

/// A fitted mixture of 2D Gaussians with diagonal covariance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GmmModel {
    pub weights: Vec<f64>,
    pub means: Vec<(f64, f64)>,
    /// Per-component variances along the two axes (not standard
    /// deviations).
    pub variances: Vec<(f64, f64)>,
}

impl GmmModel {
    pub fn m(&self) -> usize {
        self.weights.len()
    }

    fn log_component(&self, i: usize, p: (f64, f64)) -> f64 {
        let (mx, my) = self.means[i];
        let (vx, vy) = self.variances[i];
        let dx = p.0 - mx;
        let dy = p.1 - my;
        -0.5 * (dx * dx / vx + dy * dy / vy)
            - 0.5 * ((2.0 * std::f64::consts::PI).ln() * 2.0 + vx.ln() + vy.ln())
    }

    /// Log-likelihood of a point set under the mixture.
    pub fn log_likelihood(&self, points: &[(f64, f64)]) -> f64 {
        points.iter().map(|&p| self.log_density(p)).sum()
    }

    fn log_density(&self, p: (f64, f64)) -> f64 {
        let terms: Vec<f64> = (0..self.m())
            .map(|i| self.weights[i].ln() + self.log_component(i, p))
            .collect();
        log_sum_exp(&terms)
    }

    /// Responsibilities of each component for a point.
    fn responsibilities(&self, p: (f64, f64)) -> Vec<f64> {
        let terms: Vec<f64> = (0..self.m())
            .map(|i| self.weights[i].ln() + self.log_component(i, p))
            .collect();
        let lse = log_sum_exp(&terms);
        terms.iter().map(|t| (t - lse).exp()).collect()
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Fits an `m`-component diagonal GMM to the rotated dimension-`dim`
/// points of the corpus: k-means initialization, EM until the
/// log-likelihood gain drops below 1e-8 or 200 iterations. A degenerate
/// component restarts the fit with a shifted seed, up to 5 times.
pub fn fit_gmm(
    corpus: &[PersistenceDiagramSet],
    dim: usize,
    m: usize,
    seed: u64,
) -> Result<GmmModel> {
    if m == 0 {
        return Err(Error::InvalidInput("mixture needs m >= 1".into()));
    }
    let points: Vec<(f64, f64)> = corpus
        .iter()
        .flat_map(|d| rotated_points(d.bars(dim), d.max_value()))
        .collect();
    if points.len() < m {
        return Err(Error::InvalidInput(format!(
            "{} points cannot support m = {m} components",
            points.len()
        )));
    }
    let mut last_err = None;
    for attempt in 0..5 {
        match fit_once(&points, m, seed.wrapping_add(attempt)) {
            Ok(model) => return Ok(model),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap())
}

fn fit_once(points: &[(f64, f64)], m: usize, seed: u64) -> Result<GmmModel> {
    let n = points.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Plain k-means initialization.
    let mut centers: Vec<(f64, f64)> = Vec::with_capacity(m);
    centers.push(points[rng.gen_range(0..n)]);
    while centers.len() < m {
        let d2: Vec<f64> = points
            .iter()
            .map(|p| {
                centers
                    .iter()
                    .map(|c| sq(p.0 - c.0) + sq(p.1 - c.1))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = d2.iter().sum();
        if total <= 0.0 {
            centers.push(points[rng.gen_range(0..n)]);
            continue;
        }
        let mut target = rng.gen::<f64>() * total;
        let mut pick = n - 1;
        for (i, d) in d2.iter().enumerate() {
            target -= d;
            if target <= 0.0 {
                pick = i;
                break;
            }
        }
        centers.push(points[pick]);
    }
    let mut assignment = vec![0usize; n];
    for _ in 0..50 {
        let mut moved = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let d = sq(p.0 - center.0) + sq(p.1 - center.1);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if assignment[i] != best {
                assignment[i] = best;
                moved = true;
            }
        }
        let mut sums = vec![(0.0, 0.0, 0.0); m];
        for (i, p) in points.iter().enumerate() {
            let s = &mut sums[assignment[i]];
            s.0 += p.0;
            s.1 += p.1;
            s.2 += 1.0;
        }
        for (c, s) in sums.iter().enumerate() {
            if s.2 > 0.0 {
                centers[c] = (s.0 / s.2, s.1 / s.2);
            }
        }
        if !moved {
            break;
        }
    }

    // Moment-match each cluster for the initial mixture.
    let mut model = GmmModel {
        weights: vec![0.0; m],
        means: centers.clone(),
        variances: vec![(VARIANCE_FLOOR, VARIANCE_FLOOR); m],
    };
    let mut counts = vec![0.0; m];
    let mut var_acc = vec![(0.0, 0.0); m];
    for (i, p) in points.iter().enumerate() {
        let c = assignment[i];
        counts[c] += 1.0;
        var_acc[c].0 += sq(p.0 - centers[c].0);
        var_acc[c].1 += sq(p.1 - centers[c].1);
    }
    for c in 0..m {
        model.weights[c] = (counts[c] / n as f64).max(1e-8);
        if counts[c] > 0.0 {
            model.variances[c] = (
                (var_acc[c].0 / counts[c]).max(VARIANCE_FLOOR),
                (var_acc[c].1 / counts[c]).max(VARIANCE_FLOOR),
            );
        }
    }
    normalize(&mut model.weights);

    // EM.
    let mut prev_ll = f64::NEG_INFINITY;
    for _iter in 0..200 {
        let mut weight_sum = vec![0.0; m];
        let mut mean_sum = vec![(0.0, 0.0); m];
        let mut var_sum = vec![(0.0, 0.0); m];
        let mut ll = 0.0;
        for &p in points {
            let gamma = model.responsibilities(p);
            ll += model.log_density(p);
            for i in 0..m {
                weight_sum[i] += gamma[i];
                mean_sum[i].0 += gamma[i] * p.0;
                mean_sum[i].1 += gamma[i] * p.1;
            }
        }
        for i in 0..m {
            if weight_sum[i] < 1e-10 {
                return Err(Error::Model(format!("component {i} collapsed")));
            }
            model.means[i] = (mean_sum[i].0 / weight_sum[i], mean_sum[i].1 / weight_sum[i]);
        }
        for &p in points {
            let gamma = model.responsibilities(p);
            for i in 0..m {
                var_sum[i].0 += gamma[i] * sq(p.0 - model.means[i].0);
                var_sum[i].1 += gamma[i] * sq(p.1 - model.means[i].1);
            }
        }
        for i in 0..m {
            model.variances[i] = (
                (var_sum[i].0 / weight_sum[i]).max(VARIANCE_FLOOR),
                (var_sum[i].1 / weight_sum[i]).max(VARIANCE_FLOOR),
            );
            model.weights[i] = weight_sum[i] / n as f64;
        }
        normalize(&mut model.weights);
        if !ll.is_finite() {
            return Err(Error::Model("non-finite log-likelihood".into()));
        }
        if ll - prev_ll < 1e-8 && prev_ll.is_finite() {
            break;
        }
        prev_ll = ll;
    }
    Ok(model)
}

fn normalize(w: &mut [f64]) {
    let total: f64 = w.iter().sum();
    for v in w {
        *v /= total;
    }
}

fn sq(x: f64) -> f64 {
    x * x
}

/// Fisher-vector encoding of a diagram: the gradient of the rotated point
/// set's log-likelihood with respect to the component means (2m values)
/// followed by the component standard deviations (2m values).
pub fn pfv(d: &PersistenceDiagramSet, dim: usize, g: &GmmModel) -> Vec<f64> {
    let points = rotated_points(d.bars(dim), d.max_value());
    pfv_points(&points, g)
}

/// [`pfv`] on raw rotated points; shared with the finite-difference
/// checks.
pub fn pfv_points(points: &[(f64, f64)], g: &GmmModel) -> Vec<f64> {
    let m = g.m();
    let mut grad_mu = vec![0.0; 2 * m];
    let mut grad_sigma = vec![0.0; 2 * m];
    for &p in points {
        let gamma = g.responsibilities(p);
        for i in 0..m {
            let (mx, my) = g.means[i];
            let (vx, vy) = g.variances[i];
            let (sx, sy) = (vx.sqrt(), vy.sqrt());
            let dx = p.0 - mx;
            let dy = p.1 - my;
            grad_mu[2 * i] += gamma[i] * dx / vx;
            grad_mu[2 * i + 1] += gamma[i] * dy / vy;
            grad_sigma[2 * i] += gamma[i] * (dx * dx / (sx * sx * sx) - 1.0 / sx);
            grad_sigma[2 * i + 1] += gamma[i] * (dy * dy / (sy * sy * sy) - 1.0 / sy);
        }
    }
    grad_mu.extend(grad_sigma);
    grad_mu
}
