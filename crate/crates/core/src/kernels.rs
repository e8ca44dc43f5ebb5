//! Kernels on persistence diagrams and point clouds, with Gram-matrix
//! assembly and positive-semidefiniteness diagnostics.
//!
//! The diagram kernels ([`kernel_eval`]) are the scale-space kernel and
//! its exponentiated universal form, the persistence weighted Gaussian
//! kernel, the geodesic (Wasserstein-exponential) kernels, the Fisher
//! kernel, and the landscape inner-product kernel. The multiresolution
//! kernels ([`mphk`], [`smurphk`]) work directly on point clouds through
//! local-ball landscapes.
//!
//! All diagram kernels expect finite bars; cap essential classes first
//! (see `PersistenceDiagramSet::capped_bars`).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::complex::rips_filtration;
use crate::error::{Error, Result};
use crate::functions::{landscape_stack, Grid1D};
use crate::geometry::{distance_matrix, PointCloud};
use crate::linalg;
use crate::metrics::{fisher_information_metric, wasserstein, FimParams};
use crate::numfmt;
use crate::persistence::{diagrams, Bar};

/// Configuration of one diagram kernel.
#[derive(Debug, Clone)]
pub enum KernelConfig {
    /// Scale-space kernel with bandwidth `sigma`.
    Pssk { sigma: f64 },
    /// Exponentiated (universal) scale-space kernel.
    Upssk { sigma: f64 },
    /// Persistence weighted Gaussian kernel: arctan(c * persistence^p)
    /// weights and an unsquared-norm exponent, as defined.
    Pwgk { sigma: f64, c: f64, p: f64 },
    /// Geodesic topological kernel on the squared 2-Wasserstein
    /// distance. The conventional negative exponent is the default; the
    /// divergent positive-exponent form is available behind the flag.
    Gtk { h: f64, positive_exponent: bool },
    /// Geodesic Laplacian kernel on the unsquared 2-Wasserstein distance.
    Glk { h: f64, positive_exponent: bool },
    /// Fisher kernel `exp(-t0 * d_FIM)`.
    Pfk { t0: f64, fim: FimParams },
    /// Landscape inner-product kernel over the given levels and grid.
    Gphk { levels: usize, grid: Grid1D },
}

impl KernelConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            KernelConfig::Pssk { sigma } | KernelConfig::Upssk { sigma } => *sigma > 0.0,
            KernelConfig::Pwgk { sigma, c, p } => *sigma > 0.0 && *c > 0.0 && *p > 0.0,
            KernelConfig::Gtk { h, .. } | KernelConfig::Glk { h, .. } => *h > 0.0,
            KernelConfig::Pfk { t0, fim } => *t0 > 0.0 && fim.sigma > 0.0,
            KernelConfig::Gphk { levels, .. } => *levels >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid kernel config {self:?}")))
        }
    }
}

fn require_finite(bars: &[Bar]) -> Result<()> {
    if bars.iter().any(|b| b.is_infinite()) {
        return Err(Error::InvalidInput(
            "kernel input contains infinite bars; cap them first".into(),
        ));
    }
    Ok(())
}

/// Evaluates a diagram kernel on two finite-bar diagrams.
pub fn kernel_eval(d1: &[Bar], d2: &[Bar], cfg: &KernelConfig) -> Result<f64> {
    cfg.validate()?;
    require_finite(d1)?;
    require_finite(d2)?;
    match cfg {
        KernelConfig::Pssk { sigma } => Ok(pssk(d1, d2, *sigma)),
        KernelConfig::Upssk { sigma } => Ok(pssk(d1, d2, *sigma).exp()),
        KernelConfig::Pwgk { sigma, c, p } => Ok(pwgk(d1, d2, *sigma, *c, *p)),
        KernelConfig::Gtk { h, positive_exponent } => {
            let d = wasserstein(d1, d2, 2)?;
            let arg = d * d / h;
            Ok(if *positive_exponent { arg.exp() } else { (-arg).exp() })
        }
        KernelConfig::Glk { h, positive_exponent } => {
            let d = wasserstein(d1, d2, 2)?;
            let arg = d / h;
            Ok(if *positive_exponent { arg.exp() } else { (-arg).exp() })
        }
        KernelConfig::Pfk { t0, fim } => {
            if d1.is_empty() && d2.is_empty() {
                return Ok(1.0);
            }
            let d = fisher_information_metric(d1, d2, fim)?;
            Ok((-t0 * d).exp())
        }
        KernelConfig::Gphk { levels, grid } => {
            let l1 = landscape_stack(d1, *levels, grid)?;
            let l2 = landscape_stack(d2, *levels, grid)?;
            gphk_samples(&l1, &l2, grid)
        }
    }
}

/// The scale-space kernel: a double sum of Gaussians minus their
/// diagonal-mirrored counterparts, scaled by `1 / (8 pi sigma)`.
fn pssk(d1: &[Bar], d2: &[Bar], sigma: f64) -> f64 {
    let mut acc = 0.0;
    for b1 in d1 {
        for b2 in d2 {
            let direct = sq(b1.birth - b2.birth) + sq(b1.death - b2.death);
            let mirrored = sq(b1.birth - b2.death) + sq(b1.death - b2.birth);
            acc += (-direct / (8.0 * sigma)).exp() - (-mirrored / (8.0 * sigma)).exp();
        }
    }
    acc / (8.0 * std::f64::consts::PI * sigma)
}

/// The persistence weighted Gaussian kernel, with the unsquared norm in
/// the exponent exactly as defined.
fn pwgk(d1: &[Bar], d2: &[Bar], sigma: f64, c: f64, p: f64) -> f64 {
    let weight = |b: &Bar| (c * b.persistence().powf(p)).atan();
    let mut acc = 0.0;
    for b1 in d1 {
        for b2 in d2 {
            let norm = (sq(b1.birth - b2.birth) + sq(b1.death - b2.death)).sqrt();
            acc += weight(b1) * weight(b2) * (-norm / (2.0 * sigma * sigma)).exp();
        }
    }
    acc
}

fn sq(x: f64) -> f64 {
    x * x
}

/// Landscape inner-product kernel on pre-sampled landscape stacks: the
/// trapezoidal approximation of `sum_m \int lambda_m lambda'_m dx`.
pub fn gphk_samples(l1: &[Vec<f64>], l2: &[Vec<f64>], grid: &Grid1D) -> Result<f64> {
    if l1.len() != l2.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} landscape levels",
            l1.len(),
            l2.len()
        )));
    }
    let h = grid.step();
    let mut acc = 0.0;
    for (a, b) in l1.iter().zip(l2) {
        if a.len() != grid.n || b.len() != grid.n {
            return Err(Error::GridMismatch(format!(
                "landscape sampled on {} points, grid has {}",
                a.len(),
                grid.n
            )));
        }
        let products: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        acc += trapezoid(&products, h);
    }
    Ok(acc)
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    h * (values[0] / 2.0 + inner + values[values.len() - 1] / 2.0)
}

/// Configuration of the multiresolution kernels: decreasing ball radii
/// with combination weights (default `(r1/ri)^3`), and the landscape
/// recipe used inside each ball.
#[derive(Debug, Clone)]
pub struct MphkConfig {
    pub radii: Vec<f64>,
    pub weights: Option<Vec<f64>>,
    /// Homology dimension whose landscapes are compared.
    pub hom_dim: usize,
    pub levels: usize,
    pub grid: Grid1D,
    /// Max simplex dimension of the local Rips complexes; needs
    /// `hom_dim + 1` for correct homology in dimension `hom_dim`.
    pub rips_max_dim: usize,
}

impl MphkConfig {
    pub fn new(radii: Vec<f64>, hom_dim: usize, levels: usize, grid: Grid1D) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidInput("need at least one radius".into()));
        }
        if radii.windows(2).any(|w| w[0] <= w[1]) || radii.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::InvalidInput(
                "radii must be positive and strictly decreasing".into(),
            ));
        }
        Ok(MphkConfig {
            radii,
            weights: None,
            hom_dim,
            levels,
            grid,
            rips_max_dim: hom_dim + 1,
        })
    }

    fn weight(&self, i: usize) -> f64 {
        match &self.weights {
            Some(w) => w[i],
            None => (self.radii[0] / self.radii[i]).powi(3),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(w) = &self.weights {
            if w.len() != self.radii.len() {
                return Err(Error::InvalidInput("one weight per radius".into()));
            }
            if w.iter().any(|&v| v < 0.0) {
                return Err(Error::InvalidInput("weights must be nonnegative".into()));
            }
        }
        if self.levels == 0 {
            return Err(Error::InvalidInput("need at least one landscape level".into()));
        }
        Ok(())
    }
}

/// Stochastic sampling settings for [`smurphk`].
#[derive(Debug, Clone)]
pub struct SmurphkParams {
    /// Ball centers drawn from the cloud; clamps to the whole cloud when
    /// it is at least the cloud size.
    pub centers: usize,
    /// Bootstrap resamples per ball.
    pub bootstrap: usize,
    /// Use each full ball instead of resampling (the exhaustive
    /// degeneracy that reproduces [`mphk`]).
    pub full_ball: bool,
    pub seed: u64,
}

/// Landscape of the Rips filtration restricted to the ball of radius `r`
/// around `center`, sampled on the configured grid.
fn ball_landscape(
    cloud: &PointCloud,
    members: &[usize],
    cfg: &MphkConfig,
    r: f64,
) -> Result<Vec<Vec<f64>>> {
    let points: Vec<Vec<f64>> = members.iter().map(|&i| cloud.points[i].clone()).collect();
    let sub = PointCloud::new(points, "ball")?;
    let filtration = rips_filtration(&distance_matrix(&sub), cfg.rips_max_dim, 2.0 * r)?;
    let d = diagrams(&filtration)?;
    landscape_stack(d.bars(cfg.hom_dim), cfg.levels, &cfg.grid)
}

fn ball_members(cloud: &PointCloud, center: usize, r: f64) -> Vec<usize> {
    (0..cloud.len())
        .filter(|&j| cloud.distance(center, j) <= r)
        .collect()
}

fn accumulate(into: &mut [Vec<f64>], from: &[Vec<f64>]) {
    for (dst, src) in into.iter_mut().zip(from) {
        for (d, s) in dst.iter_mut().zip(src) {
            *d += s;
        }
    }
}

fn scale(stack: &mut [Vec<f64>], factor: f64) {
    for row in stack {
        for v in row {
            *v *= factor;
        }
    }
}

/// Expected local landscape at radius `r`: the average of the ball
/// landscapes over every point of the cloud.
fn expected_landscape(cloud: &PointCloud, cfg: &MphkConfig, r: f64) -> Result<Vec<Vec<f64>>> {
    let mut acc = vec![vec![0.0; cfg.grid.n]; cfg.levels];
    for c in 0..cloud.len() {
        let members = ball_members(cloud, c, r);
        let stack = ball_landscape(cloud, &members, cfg, r)?;
        accumulate(&mut acc, &stack);
    }
    scale(&mut acc, 1.0 / cloud.len() as f64);
    Ok(acc)
}

/// Multiresolution persistent homology kernel: the weighted sum over
/// radii of the inner products of the two clouds' expected local
/// landscapes.
pub fn mphk(p1: &PointCloud, p2: &PointCloud, cfg: &MphkConfig) -> Result<f64> {
    cfg.validate()?;
    let mut acc = 0.0;
    for (i, &r) in cfg.radii.iter().enumerate() {
        let e1 = expected_landscape(p1, cfg, r)?;
        let e2 = expected_landscape(p2, cfg, r)?;
        acc += cfg.weight(i) * gphk_samples(&e1, &e2, &cfg.grid)?;
    }
    Ok(acc)
}

/// Average landscape over sampled centers and bootstrap resamples.
fn sampled_landscape(
    cloud: &PointCloud,
    cfg: &MphkConfig,
    r: f64,
    sp: &SmurphkParams,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<f64>>> {
    let n = cloud.len();
    let centers: Vec<usize> = if sp.centers >= n {
        (0..n).collect()
    } else {
        // Seeded sample without replacement.
        let mut pool: Vec<usize> = (0..n).collect();
        let mut chosen = Vec::with_capacity(sp.centers);
        for _ in 0..sp.centers {
            let pick = rng.gen_range(0..pool.len());
            chosen.push(pool.swap_remove(pick));
        }
        chosen
    };
    let samples = sp.bootstrap.max(1);
    let mut acc = vec![vec![0.0; cfg.grid.n]; cfg.levels];
    for &c in &centers {
        let members = ball_members(cloud, c, r);
        for _ in 0..samples {
            let subset: Vec<usize> = if sp.full_ball {
                members.clone()
            } else {
                (0..members.len())
                    .map(|_| members[rng.gen_range(0..members.len())])
                    .collect()
            };
            // Bootstrap duplicates carry no new geometry; dedup keeps the
            // filtration well-formed.
            let mut subset = subset;
            subset.sort_unstable();
            subset.dedup();
            let stack = ball_landscape(cloud, &subset, cfg, r)?;
            accumulate(&mut acc, &stack);
        }
    }
    scale(&mut acc, 1.0 / (centers.len() * samples) as f64);
    Ok(acc)
}

/// Stochastic multiresolution kernel: [`mphk`] with `centers` sampled
/// ball centers and `bootstrap` resamples per ball. With exhaustive
/// centers and full-ball sampling it reproduces [`mphk`] exactly.
pub fn smurphk(
    p1: &PointCloud,
    p2: &PointCloud,
    cfg: &MphkConfig,
    sp: &SmurphkParams,
) -> Result<f64> {
    cfg.validate()?;
    if sp.centers == 0 {
        return Err(Error::InvalidInput("need at least one center".into()));
    }
    let mut rng1 = ChaCha8Rng::seed_from_u64(sp.seed);
    let mut rng2 = ChaCha8Rng::seed_from_u64(sp.seed.wrapping_add(1));
    let mut acc = 0.0;
    for (i, &r) in cfg.radii.iter().enumerate() {
        let e1 = sampled_landscape(p1, cfg, r, sp, &mut rng1)?;
        let e2 = sampled_landscape(p2, cfg, r, sp, &mut rng2)?;
        acc += cfg.weight(i) * gphk_samples(&e1, &e2, &cfg.grid)?;
    }
    Ok(acc)
}

/// A symmetric kernel matrix with its PSD diagnostic.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub n: usize,
    pub sample_ids: Vec<String>,
    values: Vec<f64>,
    pub min_eigenvalue: f64,
}

impl GramMatrix {
    /// Wraps raw values (assumed symmetric) without the eigenvalue
    /// diagnostic, which is left as NaN; used for fold sub-blocks where
    /// computing it would be wasted work.
    pub fn from_values(sample_ids: Vec<String>, values: Vec<f64>) -> GramMatrix {
        let n = sample_ids.len();
        assert_eq!(values.len(), n * n);
        GramMatrix {
            n,
            sample_ids,
            values,
            min_eigenvalue: f64::NAN,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Whether the minimum eigenvalue clears `-tol * trace`; geodesic
    /// kernels may legitimately fail this.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol * self.trace().abs()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// Square numeric CSV with an id header row and column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id");
        for id in &self.sample_ids {
            out.push(',');
            out.push_str(id);
        }
        out.push('\n');
        for i in 0..self.n {
            out.push_str(&self.sample_ids[i]);
            for j in 0..self.n {
                out.push(',');
                out.push_str(&numfmt::sig_digits(self.get(i, j), 9));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty gram CSV".into()))?;
        let ids: Vec<String> = header
            .split(',')
            .skip(1)
            .map(|s| s.trim().to_string())
            .collect();
        let n = ids.len();
        let mut values = vec![0.0; n * n];
        let mut row = 0;
        for (idx, raw) in lines.enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != n + 1 {
                return Err(Error::RaggedRow {
                    line: idx + 2,
                    expected: n + 1,
                    found: fields.len(),
                });
            }
            for (j, tok) in fields[1..].iter().enumerate() {
                values[row * n + j] = numfmt::parse_float(tok).ok_or_else(|| Error::NonNumeric {
                    line: idx + 2,
                    token: tok.to_string(),
                })?;
            }
            row += 1;
        }
        if row != n {
            return Err(Error::InvalidInput(format!("expected {n} rows, got {row}")));
        }
        for i in 0..n {
            for j in 0..i {
                if (values[i * n + j] - values[j * n + i]).abs()
                    > 1e-12 * values[i * n + j].abs().max(1.0)
                {
                    return Err(Error::InvalidInput(format!(
                        "gram matrix asymmetric at ({i},{j})"
                    )));
                }
            }
        }
        let min_eigenvalue = linalg::min_eigenvalue_symmetric(&values, n);
        Ok(GramMatrix {
            n,
            sample_ids: ids,
            values,
            min_eigenvalue,
        })
    }
}

/// Assembles the Gram matrix of a diagram corpus under one kernel,
/// evaluating the upper triangle in parallel, and reports the minimum
/// eigenvalue (full symmetric solve up to n = 2000, shifted power
/// iteration beyond).
pub fn gram_matrix(corpus: &[Vec<Bar>], cfg: &KernelConfig) -> Result<GramMatrix> {
    cfg.validate()?;
    let n = corpus.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let evaluated: Vec<Result<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| kernel_eval(&corpus[i], &corpus[j], cfg))
        .collect();
    let mut values = vec![0.0; n * n];
    for (&(i, j), result) in pairs.iter().zip(evaluated) {
        let v = result?;
        values[i * n + j] = v;
        values[j * n + i] = v;
    }
    let min_eigenvalue = linalg::min_eigenvalue_symmetric(&values, n);
    Ok(GramMatrix {
        n,
        sample_ids: (0..n).map(|i| format!("d{i}")).collect(),
        values,
        min_eigenvalue,
    })
}

/// Gram matrix of the multiresolution kernel over point clouds.
pub fn gram_matrix_clouds(
    clouds: &[PointCloud],
    cfg: &MphkConfig,
    stochastic: Option<&SmurphkParams>,
) -> Result<GramMatrix> {
    let n = clouds.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let evaluated: Vec<Result<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| match stochastic {
            Some(sp) => smurphk(&clouds[i], &clouds[j], cfg, sp),
            None => mphk(&clouds[i], &clouds[j], cfg),
        })
        .collect();
    let mut values = vec![0.0; n * n];
    for (&(i, j), result) in pairs.iter().zip(evaluated) {
        let v = result?;
        values[i * n + j] = v;
        values[j * n + i] = v;
    }
    let min_eigenvalue = linalg::min_eigenvalue_symmetric(&values, n);
    Ok(GramMatrix {
        n,
        sample_ids: (0..n).map(|i| format!("c{i}")).collect(),
        values,
        min_eigenvalue,
    })
}
