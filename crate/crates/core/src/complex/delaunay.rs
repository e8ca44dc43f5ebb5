//! Incremental Delaunay triangulation in 2D and 3D (Bowyer-Watson).
//!
//! Inputs are brought into general position by a deterministic,
//! index-keyed jitter of relative magnitude ~1e-9 before insertion, so
//! cocircular/cospherical configurations resolve the same way on every
//! run without exact arithmetic. Filtration values computed downstream
//! inherit a perturbation of the same order.

use crate::error::{Error, Result};

/// Relative magnitude of the symbolic perturbation. When an input is so
/// degenerate that the triangulation collapses at this magnitude (for
/// example exactly collinear points, whose circumspheres dwarf any finite
/// bounding simplex), construction retries with the larger rungs.
pub const JITTER_RELATIVE: f64 = 1e-9;
const JITTER_LADDER: [f64; 3] = [JITTER_RELATIVE, 1e-6, 1e-3];

/// A Delaunay triangulation: top-dimensional simplices over the
/// (perturbed) input points.
pub struct Triangulation {
    /// Input points after perturbation; what circumradius computations use.
    pub points: Vec<Vec<f64>>,
    /// Top-dimensional simplices, each a sorted list of `dim + 1` vertex ids.
    pub cells: Vec<Vec<usize>>,
}

struct BwCell {
    verts: Vec<usize>,
    center: Vec<f64>,
    radius2: f64,
    alive: bool,
}

/// Triangulates `points` (each of length `dim`, with `dim` 2 or 3).
pub fn triangulate(points: &[Vec<f64>], dim: usize) -> Result<Triangulation> {
    if dim != 2 && dim != 3 {
        return Err(Error::InvalidInput(format!(
            "Delaunay triangulation supports dimension 2 or 3, got {dim}"
        )));
    }
    if points.len() < dim + 1 {
        return Err(Error::InvalidInput(format!(
            "need at least {} points for a {dim}D triangulation, got {}",
            dim + 1,
            points.len()
        )));
    }
    let mut last_err = None;
    for &jitter in &JITTER_LADDER {
        match triangulate_with_jitter(points, dim, jitter) {
            Ok(tri) => return Ok(tri),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap())
}

fn triangulate_with_jitter(points: &[Vec<f64>], dim: usize, jitter: f64) -> Result<Triangulation> {
    let n = points.len();

    // Bounding box and deterministic jitter.
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in points {
        for a in 0..dim {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let diag: f64 = (0..dim)
        .map(|a| (hi[a] - lo[a]) * (hi[a] - lo[a]))
        .sum::<f64>()
        .sqrt()
        .max(1.0);
    let eps = jitter * diag;
    let mut pts: Vec<Vec<f64>> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            (0..dim)
                .map(|a| p[a] + eps * hash_unit(i as u64, a as u64))
                .collect()
        })
        .collect();

    // Super-simplex large enough that its circumspheres do not interfere
    // with the interior triangulation at this scale.
    let center: Vec<f64> = (0..dim).map(|a| (lo[a] + hi[a]) / 2.0).collect();
    let r = 1e4 * diag;
    let super_verts: Vec<Vec<f64>> = if dim == 2 {
        vec![
            vec![center[0] - 3.0 * r, center[1] - 2.0 * r],
            vec![center[0] + 3.0 * r, center[1] - 2.0 * r],
            vec![center[0], center[1] + 3.0 * r],
        ]
    } else {
        vec![
            vec![center[0] - 4.0 * r, center[1] - 3.0 * r, center[2] - 3.0 * r],
            vec![center[0] + 4.0 * r, center[1] - 3.0 * r, center[2] - 3.0 * r],
            vec![center[0], center[1] + 4.0 * r, center[2] - 3.0 * r],
            vec![center[0], center[1], center[2] + 4.0 * r],
        ]
    };
    let super_ids: Vec<usize> = (n..n + dim + 1).collect();
    pts.extend(super_verts);

    let first = make_cell(&pts, super_ids.clone());
    let mut cells: Vec<BwCell> = vec![first];

    for p in 0..n {
        insert_point(&pts, &mut cells, p, dim)?;
    }

    let final_cells: Vec<Vec<usize>> = cells
        .into_iter()
        .filter(|c| c.alive && c.verts.iter().all(|&v| v < n))
        .map(|c| c.verts)
        .collect();
    if final_cells.is_empty() {
        return Err(Error::InvalidInput(
            "degenerate input: no full-dimensional Delaunay cells".into(),
        ));
    }
    pts.truncate(n);
    Ok(Triangulation {
        points: pts,
        cells: final_cells,
    })
}

fn insert_point(pts: &[Vec<f64>], cells: &mut Vec<BwCell>, p: usize, dim: usize) -> Result<()> {
    let point = &pts[p];
    // Cells whose circumsphere contains the new point form the cavity.
    let bad: Vec<usize> = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.alive && dist2(&c.center, point) < c.radius2)
        .map(|(i, _)| i)
        .collect();
    if bad.is_empty() {
        return Err(Error::InvalidInput(
            "point located outside all circumspheres; input too degenerate".into(),
        ));
    }
    // Boundary facets of the cavity appear in exactly one bad cell.
    let mut facet_count: std::collections::HashMap<Vec<usize>, usize> =
        std::collections::HashMap::new();
    for &ci in &bad {
        for skip in 0..=dim {
            let facet: Vec<usize> = cells[ci]
                .verts
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != skip)
                .map(|(_, &v)| v)
                .collect();
            *facet_count.entry(facet).or_insert(0) += 1;
        }
    }
    for &ci in &bad {
        cells[ci].alive = false;
    }
    for (facet, count) in facet_count {
        if count != 1 {
            continue;
        }
        let mut verts = facet;
        verts.push(p);
        verts.sort_unstable();
        cells.push(make_cell(pts, verts));
    }
    Ok(())
}

fn make_cell(pts: &[Vec<f64>], verts: Vec<usize>) -> BwCell {
    let (center, radius2) = circumsphere_full(pts, &verts);
    BwCell {
        verts,
        center,
        radius2,
        alive: true,
    }
}

/// Circumcenter and squared radius of a full-dimensional simplex. A
/// numerically degenerate (flat) simplex gets an infinite sphere so it is
/// swept away by the next insertion through it.
fn circumsphere_full(pts: &[Vec<f64>], verts: &[usize]) -> (Vec<f64>, f64) {
    let dim = pts[verts[0]].len();
    let v0 = &pts[verts[0]];
    let mut a = vec![0.0; dim * dim];
    let mut b = vec![0.0; dim];
    for row in 0..dim {
        let vi = &pts[verts[row + 1]];
        let mut norm2 = 0.0;
        for col in 0..dim {
            let d = vi[col] - v0[col];
            a[row * dim + col] = 2.0 * d;
            norm2 += d * d;
        }
        b[row] = norm2;
    }
    match solve(&mut a, &mut b, dim) {
        Some(x) => {
            let center: Vec<f64> = (0..dim).map(|k| v0[k] + x[k]).collect();
            let radius2 = dist2(&center, v0);
            (center, radius2)
        }
        None => {
            let center: Vec<f64> = (0..dim)
                .map(|k| verts.iter().map(|&v| pts[v][k]).sum::<f64>() / verts.len() as f64)
                .collect();
            (center, f64::INFINITY)
        }
    }
}

/// Gaussian elimination with partial pivoting; `a` is n*n row-major,
/// `b` length n. Returns None when the pivot collapses.
pub(crate) fn solve(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let mut pivot = col;
        for row in (col + 1)..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        for row in (col + 1)..n {
            let f = a[row * n + col] / a[col * n + col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in (col + 1)..n {
            acc -= a[col * n + k] * x[k];
        }
        x[col] = acc / a[col * n + col];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Deterministic hash of (index, axis) to [-0.5, 0.5).
fn hash_unit(i: u64, axis: u64) -> f64 {
    let mut z = i
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(axis.wrapping_mul(0xbf58_476d_1ce4_e5b9))
        .wrapping_add(0x94d0_49bb_1331_11eb);
    z ^= z >> 30;
    z = z.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    (z as f64 / u64::MAX as f64) - 0.5
}
