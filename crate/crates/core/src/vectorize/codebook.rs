//! Persistence codebooks: seeded k-means over rotated diagrams, with
//! bag-of-words counts and VLAD residual encodings.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::weight_ramp;
use crate::persistence::PersistenceDiagramSet;

use super::rotated_points;

/// A fitted codebook: cluster centers in the rotated (birth, persistence)
/// plane.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Codebook {
    pub centers: Vec<(f64, f64)>,
    pub weighted: bool,
    /// Persistence-quantile ramp thresholds used when `weighted`.
    pub t1: f64,
    pub t2: f64,
}

impl Codebook {
    pub fn k(&self) -> usize {
        self.centers.len()
    }

    fn nearest(&self, p: (f64, f64)) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, c) in self.centers.iter().enumerate() {
            let d = sq_dist(p, *c);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }
}

fn sq_dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    dx * dx + dy * dy
}

/// Gathers the rotated points of one dimension across a corpus, capping
/// each diagram's infinite deaths at its own maximum filtration value.
fn corpus_points(corpus: &[PersistenceDiagramSet], dim: usize) -> Vec<(f64, f64)> {
    corpus
        .iter()
        .flat_map(|d| rotated_points(d.bars(dim), d.max_value()))
        .collect()
}

/// Fits a k-means codebook (k-means++ seeding, Lloyd iterations until
/// center movement falls below 1e-6 or 100 rounds) on the rotated
/// dimension-`dim` points of the corpus.
///
/// When `weighted`, points carry the persistence-image ramp weight with
/// thresholds at the corpus 0.05/0.95 persistence quantiles, and both the
/// seeding probabilities and the centroid updates use those weights.
pub fn fit_codebook(
    corpus: &[PersistenceDiagramSet],
    dim: usize,
    k: usize,
    weighted: bool,
    seed: u64,
) -> Result<Codebook> {
    if k == 0 {
        return Err(Error::InvalidInput("codebook needs k >= 1".into()));
    }
    let points = corpus_points(corpus, dim);
    if points.len() < k {
        return Err(Error::InvalidInput(format!(
            "{} rotated points cannot support k = {k}",
            points.len()
        )));
    }
    let (t1, t2) = if weighted {
        persistence_quantiles(&points)
    } else {
        (0.0, 1.0)
    };
    let weights: Vec<f64> = if weighted {
        points
            .iter()
            .map(|p| weight_ramp(p.1, t1, t2).max(1e-12))
            .collect()
    } else {
        vec![1.0; points.len()]
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = kmeans_pp_init(&points, &weights, k, &mut rng);
    let mut assignment = vec![0usize; points.len()];
    for _round in 0..100 {
        for (i, p) in points.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let d = sq_dist(*p, *center);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            assignment[i] = best;
        }
        let mut sums = vec![(0.0, 0.0, 0.0); k];
        for (i, p) in points.iter().enumerate() {
            let w = weights[i];
            let s = &mut sums[assignment[i]];
            s.0 += w * p.0;
            s.1 += w * p.1;
            s.2 += w;
        }
        let mut movement: f64 = 0.0;
        for (c, s) in sums.iter().enumerate() {
            if s.2 > 0.0 {
                let next = (s.0 / s.2, s.1 / s.2);
                movement = movement.max(sq_dist(next, centers[c]).sqrt());
                centers[c] = next;
            }
        }
        if movement < 1e-6 {
            break;
        }
    }
    Ok(Codebook {
        centers,
        weighted,
        t1,
        t2,
    })
}

/// 0.05 / 0.95 persistence quantiles of the rotated points; collapses to
/// a thin positive ramp when the spread is degenerate.
fn persistence_quantiles(points: &[(f64, f64)]) -> (f64, f64) {
    let mut pers: Vec<f64> = points.iter().map(|p| p.1).collect();
    pers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |f: f64| pers[((pers.len() - 1) as f64 * f).round() as usize];
    let (t1, t2) = (q(0.05), q(0.95));
    if t2 > t1 {
        (t1, t2)
    } else {
        (0.0, t1.max(1e-6))
    }
}

/// Weighted k-means++ seeding: first center by weight, subsequent centers
/// with probability proportional to weight times squared distance to the
/// nearest chosen center.
fn kmeans_pp_init(
    points: &[(f64, f64)],
    weights: &[f64],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(f64, f64)> {
    let mut centers = Vec::with_capacity(k);
    let total: f64 = weights.iter().sum();
    let first = sample_index(weights, total, rng);
    centers.push(points[first]);
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(*p, centers[0])).collect();
    while centers.len() < k {
        let scores: Vec<f64> = d2
            .iter()
            .zip(weights)
            .map(|(d, w)| d * w)
            .collect();
        let total: f64 = scores.iter().sum();
        let next = if total > 0.0 {
            sample_index(&scores, total, rng)
        } else {
            // All remaining points coincide with a center; any choice is
            // equivalent.
            rng.gen_range(0..points.len())
        };
        centers.push(points[next]);
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(*p, points[next]));
        }
    }
    centers
}

fn sample_index(scores: &[f64], total: f64, rng: &mut ChaCha8Rng) -> usize {
    let mut target = rng.gen::<f64>() * total;
    for (i, s) in scores.iter().enumerate() {
        target -= s;
        if target <= 0.0 {
            return i;
        }
    }
    scores.len() - 1
}

/// Bag-of-words encoding: hard-assign each rotated point of dimension
/// `dim` to its nearest center and count per center.
pub fn pbow(d: &PersistenceDiagramSet, dim: usize, cb: &Codebook) -> Vec<f64> {
    let mut counts = vec![0.0; cb.k()];
    for p in rotated_points(d.bars(dim), d.max_value()) {
        counts[cb.nearest(p)] += 1.0;
    }
    counts
}

/// VLAD encoding: per center, the summed residual (point minus center)
/// over the points assigned to it, concatenated into a `2k` vector.
pub fn pvlad(d: &PersistenceDiagramSet, dim: usize, cb: &Codebook) -> Vec<f64> {
    let mut residuals = vec![(0.0, 0.0); cb.k()];
    for p in rotated_points(d.bars(dim), d.max_value()) {
        let i = cb.nearest(p);
        residuals[i].0 += p.0 - cb.centers[i].0;
        residuals[i].1 += p.1 - cb.centers[i].1;
    }
    residuals.into_iter().flat_map(|(x, y)| [x, y]).collect()
}
