//! Functional summaries of persistence diagrams: Betti curves, the
//! smoothed Betti function, landscapes, persistence images, and
//! persistent entropy.
//!
//! Infinite deaths are capped at the evaluation grid (or image domain)
//! end before anything is evaluated, so every summary is total.

use crate::error::{Error, Result};
use crate::persistence::Bar;

/// Uniform evaluation grid on `[start, end]` with `n >= 2` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    pub start: f64,
    pub end: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(start: f64, end: f64, n: usize) -> Result<Self> {
        if !(end > start) {
            return Err(Error::InvalidInput(format!(
                "grid end {end} must exceed start {start}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidInput("grid needs at least 2 samples".into()));
        }
        Ok(Grid1D { start, end, n })
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + (self.end - self.start) * i as f64 / (self.n - 1) as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.point(i))
    }

    pub fn step(&self) -> f64 {
        (self.end - self.start) / (self.n - 1) as f64
    }
}

fn capped(bars: &[Bar], cap: f64) -> Vec<(f64, f64)> {
    bars.iter()
        .map(|b| (b.birth, if b.death.is_finite() { b.death } else { cap }))
        .collect()
}

/// Betti curve: at each grid point, the number of bars whose closed
/// interval `[birth, death]` covers it.
pub fn betti_curve(bars: &[Bar], grid: &Grid1D) -> Vec<f64> {
    let bars = capped(bars, grid.end);
    grid.points()
        .map(|x| bars.iter().filter(|(a, b)| *a <= x && x <= *b).count() as f64)
        .collect()
}

/// Per-bar weights for [`betti_function`]; defaults to all ones.
#[derive(Debug, Clone)]
pub struct BettiFunctionParams {
    pub weights: Vec<f64>,
}

impl BettiFunctionParams {
    pub fn uniform(n: usize) -> Self {
        BettiFunctionParams {
            weights: vec![1.0; n],
        }
    }
}

/// Smooth Betti function: each bar contributes a Gaussian-shaped bump
/// centered at its midpoint with width proportional to its length,
/// `exp(-((x - (a+b)/2) / (w (b-a)))^2)`. Zero-length bars cannot be
/// widened and are skipped.
pub fn betti_function(bars: &[Bar], params: &BettiFunctionParams, grid: &Grid1D) -> Result<Vec<f64>> {
    if params.weights.len() < bars.len() {
        return Err(Error::InvalidInput(format!(
            "{} weights for {} bars",
            params.weights.len(),
            bars.len()
        )));
    }
    if params.weights.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::InvalidInput("weights must be positive".into()));
    }
    let capped = capped(bars, grid.end);
    let mut out = vec![0.0; grid.n];
    for (j, (a, b)) in capped.iter().enumerate() {
        let length = b - a;
        if length <= 0.0 {
            continue;
        }
        let mid = (a + b) / 2.0;
        let width = params.weights[j] * length;
        for (i, x) in grid.points().enumerate() {
            let z = (x - mid) / width;
            out[i] += (-z * z).exp();
        }
    }
    Ok(out)
}

/// The tent function of one bar: `min(x - a, b - x)` clamped at zero.
fn tent(x: f64, a: f64, b: f64) -> f64 {
    (x - a).min(b - x).max(0.0)
}

/// Persistence landscape level `m` (1-based) sampled on the grid: at each
/// point, the m-th largest tent value, zero when fewer than `m` bars
/// cover it.
pub fn landscape(bars: &[Bar], level: usize, grid: &Grid1D) -> Result<Vec<f64>> {
    if level == 0 {
        return Err(Error::InvalidInput("landscape levels are 1-based".into()));
    }
    let bars = capped(bars, grid.end);
    let mut values = Vec::with_capacity(bars.len());
    Ok(grid
        .points()
        .map(|x| {
            values.clear();
            values.extend(bars.iter().map(|(a, b)| tent(x, *a, *b)));
            values.sort_by(|p, q| q.partial_cmp(p).unwrap());
            values.get(level - 1).copied().unwrap_or(0.0)
        })
        .collect())
}

/// All landscape levels `1..=levels` stacked row-major (level, then grid
/// point).
pub fn landscape_stack(bars: &[Bar], levels: usize, grid: &Grid1D) -> Result<Vec<Vec<f64>>> {
    (1..=levels).map(|m| landscape(bars, m, grid)).collect()
}

/// Persistence image parameters.
#[derive(Debug, Clone)]
pub struct ImageParams {
    /// Gaussian bandwidth of the bump placed at each rotated point.
    pub sigma: f64,
    /// Weight ramp thresholds: weight 0 at persistence <= t1, linear up
    /// to 1 at t2.
    pub t1: f64,
    pub t2: f64,
    /// Pixels along the birth and persistence axes.
    pub resolution: (usize, usize),
    /// Rectangle in the rotated (birth, persistence) plane.
    pub birth_range: (f64, f64),
    pub pers_range: (f64, f64),
}

impl ImageParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) {
            return Err(Error::InvalidInput("sigma must be > 0".into()));
        }
        if !(self.t2 > self.t1) || !(self.t1 >= 0.0) {
            return Err(Error::InvalidInput("need t2 > t1 >= 0".into()));
        }
        if self.resolution.0 == 0 || self.resolution.1 == 0 {
            return Err(Error::InvalidInput("resolution must be positive".into()));
        }
        if !(self.birth_range.1 > self.birth_range.0) || !(self.pers_range.1 > self.pers_range.0) {
            return Err(Error::InvalidInput("degenerate image domain".into()));
        }
        Ok(())
    }

    /// Defaults echoing the codebook quantile convention: `sigma` is 0.1x
    /// the largest persistence in the corpus, `t1`/`t2` the 0.05/0.95
    /// persistence quantiles; the domain covers births and persistences
    /// padded by 3 sigma.
    pub fn from_corpus(corpora: &[&[Bar]], resolution: (usize, usize)) -> Result<Self> {
        let mut pers: Vec<f64> = Vec::new();
        let mut max_birth: f64 = 0.0;
        let mut min_birth = f64::INFINITY;
        let mut max_finite: f64 = 0.0;
        for bars in corpora {
            for b in bars.iter() {
                if b.death.is_finite() {
                    max_finite = max_finite.max(b.death);
                }
            }
        }
        let cap = if max_finite > 0.0 { max_finite } else { 1.0 };
        for bars in corpora {
            for b in bars.iter() {
                let death = if b.death.is_finite() { b.death } else { cap };
                pers.push(death - b.birth);
                max_birth = max_birth.max(b.birth);
                min_birth = min_birth.min(b.birth);
            }
        }
        if pers.is_empty() {
            return Err(Error::InvalidInput("empty corpus".into()));
        }
        pers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let quantile = |q: f64| -> f64 {
            let idx = ((pers.len() - 1) as f64 * q).round() as usize;
            pers[idx]
        };
        let max_pers = *pers.last().unwrap();
        let sigma = (0.1 * max_pers).max(1e-6);
        let mut t1 = quantile(0.05);
        let mut t2 = quantile(0.95);
        if !(t2 > t1) {
            // Degenerate spread; fall back to a thin ramp above zero.
            t1 = 0.0;
            t2 = max_pers.max(1e-6);
        }
        Ok(ImageParams {
            sigma,
            t1,
            t2,
            resolution,
            birth_range: (min_birth.min(0.0) - 3.0 * sigma, max_birth + 3.0 * sigma),
            pers_range: (-3.0 * sigma, max_pers + 3.0 * sigma),
        })
    }
}

/// Persistence image: the persistence surface (weighted Gaussian bumps at
/// the rotated points `(birth, persistence)`) integrated over each pixel
/// with a 2-point Gauss-Legendre rule per axis.
pub fn persistence_image(bars: &[Bar], p: &ImageParams) -> Result<Vec<f64>> {
    p.validate()?;
    let (nx, ny) = p.resolution;
    // Infinite deaths land at the top of the persistence domain.
    let points: Vec<(f64, f64)> = bars
        .iter()
        .map(|b| {
            let pers = if b.death.is_finite() {
                b.death - b.birth
            } else {
                p.pers_range.1
            };
            (b.birth, pers)
        })
        .collect();
    let dx = (p.birth_range.1 - p.birth_range.0) / nx as f64;
    let dy = (p.pers_range.1 - p.pers_range.0) / ny as f64;
    // 2-point Gauss-Legendre nodes on [-1/2, 1/2].
    let node = 0.5 / 3f64.sqrt();
    let offsets = [-node, node];
    let norm = 1.0 / (2.0 * std::f64::consts::PI * p.sigma * p.sigma);
    let inv2s2 = 1.0 / (2.0 * p.sigma * p.sigma);

    let surface = |x: f64, y: f64| -> f64 {
        let w = weight_ramp(y, p.t1, p.t2);
        if w == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for &(a, pers) in &points {
            let dx = x - a;
            let dy = y - pers;
            acc += (-(dx * dx + dy * dy) * inv2s2).exp();
        }
        w * norm * acc
    };

    let mut pixels = vec![0.0; nx * ny];
    for iy in 0..ny {
        let cy = p.pers_range.0 + (iy as f64 + 0.5) * dy;
        for ix in 0..nx {
            let cx = p.birth_range.0 + (ix as f64 + 0.5) * dx;
            let mut integral = 0.0;
            for &ox in &offsets {
                for &oy in &offsets {
                    integral += surface(cx + ox * dx, cy + oy * dy);
                }
            }
            // Equal Gauss-Legendre weights: cell area / 4 per node.
            pixels[iy * nx + ix] = integral * dx * dy / 4.0;
        }
    }
    Ok(pixels)
}

/// The persistence-image weight ramp: 0 below `t1`, linear between, 1 at
/// and above `t2`.
pub fn weight_ramp(y: f64, t1: f64, t2: f64) -> f64 {
    if y <= t1 {
        0.0
    } else if y < t2 {
        (y - t1) / (t2 - t1)
    } else {
        1.0
    }
}

/// Shannon entropy of the normalized bar lengths. Infinite bars are
/// excluded; errors when no finite bar remains.
pub fn persistent_entropy(bars: &[Bar]) -> Result<f64> {
    let lengths: Vec<f64> = bars
        .iter()
        .filter(|b| b.death.is_finite())
        .map(|b| b.persistence())
        .filter(|&l| l > 0.0)
        .collect();
    if lengths.is_empty() {
        return Err(Error::InvalidInput(
            "persistent entropy needs at least one finite bar".into(),
        ));
    }
    let total: f64 = lengths.iter().sum();
    Ok(lengths
        .iter()
        .map(|l| {
            let p = l / total;
            -p * p.ln()
        })
        .sum())
}
