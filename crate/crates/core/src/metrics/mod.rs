//! Distances between persistence diagrams: exact bottleneck and
//! p-Wasserstein matchings on diagonal-augmented diagrams, the sliced
//! Wasserstein approximation, and the Fisher information metric.
//!
//! All four expect finite bars. Essential (infinite-death) bars would
//! dominate any matching, so the entry points verify both diagrams carry
//! the same number of them, then drop them; a mismatch is an error.

mod assignment;

pub use assignment::{hungarian, max_bipartite_matching};

use crate::error::{Error, Result};
use crate::persistence::Bar;

/// Sliced Wasserstein configuration: the number of uniform projection
/// angles spanning `[-pi/2, pi/2)`.
#[derive(Debug, Clone, Copy)]
pub struct SwParams {
    pub slices: usize,
}

impl Default for SwParams {
    fn default() -> Self {
        SwParams { slices: 50 }
    }
}

/// Fisher-information-metric configuration.
#[derive(Debug, Clone, Copy)]
pub struct FimParams {
    /// Bandwidth of the Gaussian placed at each diagram point.
    pub sigma: f64,
    /// Grid points per axis for the density discretization.
    pub grid_resolution: usize,
    /// Domain padding in multiples of sigma.
    pub padding: f64,
}

impl Default for FimParams {
    fn default() -> Self {
        FimParams {
            sigma: 0.5,
            grid_resolution: 48,
            padding: 3.0,
        }
    }
}

/// Checks the essential-bar counts match, then returns the finite
/// (birth, death) pairs of both diagrams.
fn finite_parts(d1: &[Bar], d2: &[Bar]) -> Result<(Vec<(f64, f64)>, Vec<(f64, f64)>)> {
    let inf1 = d1.iter().filter(|b| b.is_infinite()).count();
    let inf2 = d2.iter().filter(|b| b.is_infinite()).count();
    if inf1 != inf2 {
        return Err(Error::MismatchedInfiniteBars { left: inf1, right: inf2 });
    }
    let take = |d: &[Bar]| {
        d.iter()
            .filter(|b| !b.is_infinite())
            .map(|b| (b.birth, b.death))
            .collect()
    };
    Ok((take(d1), take(d2)))
}

fn linf(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).abs().max((p.1 - q.1).abs())
}

/// L-infinity distance from a point to the diagonal.
fn diagonal_distance(p: (f64, f64)) -> f64 {
    (p.1 - p.0) / 2.0
}

/// Cost matrix on the diagonal-augmented diagrams: real-to-real pairs at
/// L-infinity cost (raised to `power`), real-to-diagonal at the diagonal
/// distance, diagonal-to-diagonal free.
fn augmented_cost(p1: &[(f64, f64)], p2: &[(f64, f64)], power: i32) -> (Vec<f64>, usize) {
    let (n1, n2) = (p1.len(), p2.len());
    let n = n1 + n2;
    let mut cost = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let c = match (i < n1, j < n2) {
                (true, true) => linf(p1[i], p2[j]),
                (true, false) => diagonal_distance(p1[i]),
                (false, true) => diagonal_distance(p2[j]),
                (false, false) => 0.0,
            };
            cost[i * n + j] = c.powi(power);
        }
    }
    (cost, n)
}

/// Exact bottleneck distance: binary search over the candidate costs of
/// the augmented matching problem, testing feasibility with a maximum
/// bipartite matching on the threshold graph.
pub fn bottleneck(d1: &[Bar], d2: &[Bar]) -> Result<f64> {
    let (p1, p2) = finite_parts(d1, d2)?;
    if p1.is_empty() && p2.is_empty() {
        return Ok(0.0);
    }
    let (cost, n) = augmented_cost(&p1, &p2, 1);
    // Candidate thresholds, deduplicated at 1e-12.
    let mut candidates: Vec<f64> = cost.clone();
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);

    let feasible = |threshold: f64| -> bool {
        let adjacency: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| cost[i * n + j] <= threshold)
                    .collect()
            })
            .collect();
        max_bipartite_matching(&adjacency, n) == n
    };

    let mut lo = 0;
    let mut hi = candidates.len() - 1;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo])
}

/// Exact p-Wasserstein distance by the Hungarian algorithm on the
/// augmented cost matrix; `p` is a positive integer.
pub fn wasserstein(d1: &[Bar], d2: &[Bar], p: u32) -> Result<f64> {
    if p == 0 {
        return Err(Error::InvalidInput("wasserstein needs p >= 1".into()));
    }
    let (p1, p2) = finite_parts(d1, d2)?;
    if p1.is_empty() && p2.is_empty() {
        return Ok(0.0);
    }
    let (cost, n) = augmented_cost(&p1, &p2, p as i32);
    let (total, _) = hungarian(&cost, n);
    Ok(total.max(0.0).powf(1.0 / p as f64))
}

/// Sliced Wasserstein distance: for each projection angle, both diagrams
/// are augmented with the other's diagonal projections, projected to the
/// line, and matched in sorted order (1D optimal transport with L1
/// cost); the slice costs approximate `(1/2pi) \int W dtheta` by a
/// Riemann sum.
pub fn sliced_wasserstein(d1: &[Bar], d2: &[Bar], sw: SwParams) -> Result<f64> {
    if sw.slices == 0 {
        return Err(Error::InvalidInput("need at least one slice".into()));
    }
    let (p1, p2) = finite_parts(d1, d2)?;
    let project_diag = |p: (f64, f64)| -> (f64, f64) {
        let m = (p.0 + p.1) / 2.0;
        (m, m)
    };
    // Side A: D1 plus the projections of D2; side B symmetric.
    let side_a: Vec<(f64, f64)> = p1
        .iter()
        .copied()
        .chain(p2.iter().map(|&q| project_diag(q)))
        .collect();
    let side_b: Vec<(f64, f64)> = p2
        .iter()
        .copied()
        .chain(p1.iter().map(|&q| project_diag(q)))
        .collect();

    let mut total = 0.0;
    let mut proj_a = vec![0.0; side_a.len()];
    let mut proj_b = vec![0.0; side_b.len()];
    for s in 0..sw.slices {
        let theta = -std::f64::consts::FRAC_PI_2
            + std::f64::consts::PI * s as f64 / sw.slices as f64;
        let (c, sn) = (theta.cos(), theta.sin());
        for (dst, p) in proj_a.iter_mut().zip(&side_a) {
            *dst = p.0 * c + p.1 * sn;
        }
        for (dst, p) in proj_b.iter_mut().zip(&side_b) {
            *dst = p.0 * c + p.1 * sn;
        }
        proj_a.sort_by(|a, b| a.partial_cmp(b).unwrap());
        proj_b.sort_by(|a, b| a.partial_cmp(b).unwrap());
        total += proj_a
            .iter()
            .zip(&proj_b)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>();
    }
    Ok(total / (2.0 * sw.slices as f64))
}

/// Fisher information metric: both diagrams (each augmented with the
/// other's diagonal projections) become normalized Gaussian-mixture
/// densities on a shared grid; the distance is the arccos of their
/// Bhattacharyya coefficient.
pub fn fisher_information_metric(d1: &[Bar], d2: &[Bar], fp: &FimParams) -> Result<f64> {
    if !(fp.sigma > 0.0) || fp.grid_resolution < 2 {
        return Err(Error::InvalidInput("invalid FIM parameters".into()));
    }
    let (p1, p2) = finite_parts(d1, d2)?;
    if p1.is_empty() && p2.is_empty() {
        return Err(Error::InvalidInput("FIM needs at least one point".into()));
    }
    let project_diag = |p: (f64, f64)| -> (f64, f64) {
        let m = (p.0 + p.1) / 2.0;
        (m, m)
    };
    let set1: Vec<(f64, f64)> = p1
        .iter()
        .copied()
        .chain(p2.iter().map(|&q| project_diag(q)))
        .collect();
    let set2: Vec<(f64, f64)> = p2
        .iter()
        .copied()
        .chain(p1.iter().map(|&q| project_diag(q)))
        .collect();

    // Shared grid covering both unions, padded by `padding` sigma.
    let pad = fp.padding * fp.sigma;
    let all = set1.iter().chain(&set2);
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in all {
        lo.0 = lo.0.min(p.0);
        lo.1 = lo.1.min(p.1);
        hi.0 = hi.0.max(p.0);
        hi.1 = hi.1.max(p.1);
    }
    let res = fp.grid_resolution;
    let dx = (hi.0 - lo.0 + 2.0 * pad) / res as f64;
    let dy = (hi.1 - lo.1 + 2.0 * pad) / res as f64;
    let density = |points: &[(f64, f64)]| -> Vec<f64> {
        let inv2s2 = 1.0 / (2.0 * fp.sigma * fp.sigma);
        let mut rho = vec![0.0; res * res];
        for iy in 0..res {
            let y = lo.1 - pad + (iy as f64 + 0.5) * dy;
            for ix in 0..res {
                let x = lo.0 - pad + (ix as f64 + 0.5) * dx;
                let mut acc = 0.0;
                for &(px, py) in points {
                    let dxp = x - px;
                    let dyp = y - py;
                    acc += (-(dxp * dxp + dyp * dyp) * inv2s2).exp();
                }
                rho[iy * res + ix] = acc;
            }
        }
        let total: f64 = rho.iter().sum::<f64>() * dx * dy;
        if total > 0.0 {
            for v in &mut rho {
                *v /= total;
            }
        }
        rho
    };
    let rho1 = density(&set1);
    let rho2 = density(&set2);
    // arccos of the Bhattacharyya coefficient, evaluated through the
    // Hellinger integral: with cos(theta) = 1 - H^2/2 this is
    // 2 asin(H/2), which stays accurate when the densities are nearly
    // identical (acos collapses to ~1e-8 noise there).
    let hellinger_sq: f64 = rho1
        .iter()
        .zip(&rho2)
        .map(|(a, b)| {
            let d = a.max(0.0).sqrt() - b.max(0.0).sqrt();
            d * d
        })
        .sum::<f64>()
        * dx
        * dy;
    let half = (hellinger_sq.max(0.0).sqrt() / 2.0).clamp(0.0, 1.0);
    Ok(2.0 * half.asin())
}

#[cfg(test)]
pub(crate) fn bar(a: f64, b: f64) -> Bar {
    Bar {
        birth: a,
        death: b,
        birth_index: 0,
        death_index: None,
    }
}
