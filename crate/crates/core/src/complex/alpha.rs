//! Alpha filtration of a 2D or 3D point cloud.
//!
//! Cells are the simplices of the Delaunay triangulation. A top simplex
//! enters at its circumradius. A face enters at its own smallest
//! enclosing-sphere radius when that sphere is empty of other points
//! (the Gabriel condition, checked locally against the opposite vertex of
//! each coface), otherwise at the smallest value among its cofaces.
//! Vertices enter at 0. Values are radii, in the units of the input.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

use super::delaunay::{self, dist2, solve};
use super::{Cell, Filtration, ScaleConvention, Simplex};

pub fn alpha_filtration(pc: &PointCloud) -> Result<Filtration> {
    let dim = pc.dim;
    if dim != 2 && dim != 3 {
        return Err(Error::InvalidInput(format!(
            "alpha filtration needs ambient dimension 2 or 3, got {dim}"
        )));
    }
    let tri = delaunay::triangulate(&pc.points, dim)?;
    let pts = &tri.points;

    // Collect every subset of every Delaunay cell, grouped by dimension.
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut simplices: Vec<Vec<usize>> = Vec::new();
    for cell in &tri.cells {
        for subset_mask in 1u32..(1 << cell.len()) {
            let verts: Vec<usize> = (0..cell.len())
                .filter(|k| subset_mask & (1 << k) != 0)
                .map(|k| cell[k])
                .collect();
            index.entry(verts.clone()).or_insert_with(|| {
                simplices.push(verts);
                simplices.len() - 1
            });
        }
    }

    let mut values: Vec<Option<f64>> = vec![None; simplices.len()];
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); dim + 1];
    for (i, s) in simplices.iter().enumerate() {
        by_dim[s.len() - 1].push(i);
    }

    for k in (1..=dim).rev() {
        for &si in &by_dim[k] {
            let verts = simplices[si].clone();
            if values[si].is_none() {
                values[si] = Some(min_circumradius(pts, &verts));
            }
            let sigma_value = values[si].unwrap();
            if k == 1 {
                continue; // vertices enter at 0
            }
            for skip in 0..verts.len() {
                let facet: Vec<usize> = verts
                    .iter()
                    .enumerate()
                    .filter(|(pos, _)| *pos != skip)
                    .map(|(_, &v)| v)
                    .collect();
                let opposite = verts[skip];
                let fi = index[&facet];
                match values[fi] {
                    Some(v) => values[fi] = Some(v.min(sigma_value)),
                    None => {
                        if !is_gabriel(pts, &facet, opposite) {
                            values[fi] = Some(sigma_value);
                        }
                    }
                }
            }
        }
    }

    // The perturbation can break exact value ties between a face and its
    // cofaces (e.g. the diametric edge of a right triangle) by ~1e-9;
    // clamp faces down to restore monotonicity exactly.
    for k in (2..=dim).rev() {
        for &si in &by_dim[k] {
            let sigma_value = values[si].unwrap();
            let verts = &simplices[si];
            for skip in 0..verts.len() {
                let facet: Vec<usize> = verts
                    .iter()
                    .enumerate()
                    .filter(|(pos, _)| *pos != skip)
                    .map(|(_, &v)| v)
                    .collect();
                let fi = index[&facet];
                let v = values[fi].unwrap();
                values[fi] = Some(v.min(sigma_value));
            }
        }
    }

    let mut cells: Vec<(Cell, f64)> = Vec::with_capacity(simplices.len());
    for (i, verts) in simplices.into_iter().enumerate() {
        let value = if verts.len() == 1 {
            0.0
        } else {
            values[i].expect("all positive-dimensional simplices assigned")
        };
        cells.push((Cell::Simplex(Simplex::new(verts)?), value));
    }
    Filtration::new(cells, ScaleConvention::Circumradius)
}

/// Center and squared radius of the smallest sphere through the vertices
/// of a simplex (centered in its affine hull).
fn min_circumsphere(pts: &[Vec<f64>], verts: &[usize]) -> (Vec<f64>, f64) {
    let dim = pts[verts[0]].len();
    let k = verts.len() - 1;
    let v0 = &pts[verts[0]];
    if k == 0 {
        return (v0.clone(), 0.0);
    }
    // Solve the Gram system for barycentric-like coordinates of the
    // center within the affine hull: 2 (vi-v0).(c-v0) = |vi-v0|^2.
    let edges: Vec<Vec<f64>> = verts[1..]
        .iter()
        .map(|&v| (0..dim).map(|a| pts[v][a] - v0[a]).collect())
        .collect();
    let mut gram = vec![0.0; k * k];
    let mut rhs = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            gram[i * k + j] = 2.0 * dotv(&edges[i], &edges[j]);
        }
        rhs[i] = dotv(&edges[i], &edges[i]);
    }
    match solve(&mut gram, &mut rhs, k) {
        Some(x) => {
            let mut center = v0.clone();
            for (i, e) in edges.iter().enumerate() {
                for a in 0..dim {
                    center[a] += x[i] * e[a];
                }
            }
            let r2 = dist2(&center, v0);
            (center, r2)
        }
        // Degenerate faces can only come from near-duplicate points; give
        // them a tiny sphere at the centroid.
        None => {
            let center: Vec<f64> = (0..dim)
                .map(|a| verts.iter().map(|&v| pts[v][a]).sum::<f64>() / verts.len() as f64)
                .collect();
            let r2 = verts.iter().map(|&v| dist2(&center, &pts[v])).fold(0.0, f64::max);
            (center, r2)
        }
    }
}

fn min_circumradius(pts: &[Vec<f64>], verts: &[usize]) -> f64 {
    min_circumsphere(pts, verts).1.sqrt()
}

/// Gabriel test of a face against a single point: true when the point
/// lies on or outside the face's smallest circumsphere.
fn is_gabriel(pts: &[Vec<f64>], facet: &[usize], opposite: usize) -> bool {
    let (center, r2) = min_circumsphere(pts, facet);
    dist2(&center, &pts[opposite]) >= r2
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
