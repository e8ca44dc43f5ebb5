//! Vietoris-Rips filtration from a distance matrix.

use crate::error::{Error, Result};
use crate::geometry::DistanceMatrix;

use super::{Cell, Filtration, ScaleConvention, Simplex};

/// Builds the Rips filtration: every simplex of dimension `<= max_dim`
/// whose diameter (largest pairwise distance) is `<= max_scale`, entering
/// at its diameter; vertices enter at 0. The scale is a distance
/// threshold, so values carry the units of the input data; scale 0 keeps
/// the vertices (and any coincident-point edges) only.
pub fn rips_filtration(dm: &DistanceMatrix, max_dim: usize, max_scale: f64) -> Result<Filtration> {
    if !(max_scale >= 0.0) {
        return Err(Error::InvalidInput("max_scale must be >= 0".into()));
    }
    let n = dm.n;
    let mut cells: Vec<(Cell, f64)> = Vec::new();
    for v in 0..n {
        cells.push((Cell::Simplex(Simplex::new(vec![v])?), 0.0));
    }
    if max_dim == 0 || n < 2 {
        return Filtration::new(cells, ScaleConvention::Diameter);
    }

    // Upper-neighbor lists: j > i with d(i, j) within scale.
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| ((i + 1)..n).filter(|&j| dm.get(i, j) <= max_scale).collect())
        .collect();

    let mut stack_verts: Vec<usize> = Vec::with_capacity(max_dim + 1);
    for i in 0..n {
        stack_verts.push(i);
        let candidates = neighbors[i].clone();
        expand(
            dm,
            &neighbors,
            max_dim,
            &mut stack_verts,
            0.0,
            &candidates,
            &mut cells,
        );
        stack_verts.pop();
    }
    Filtration::new(cells, ScaleConvention::Diameter)
}

/// Depth-first clique expansion. `verts` is the current simplex (sorted),
/// `diameter` its value, and `candidates` the vertices above all current
/// ones that are within scale of each of them.
fn expand(
    dm: &DistanceMatrix,
    neighbors: &[Vec<usize>],
    max_dim: usize,
    verts: &mut Vec<usize>,
    diameter: f64,
    candidates: &[usize],
    cells: &mut Vec<(Cell, f64)>,
) {
    for (pos, &next) in candidates.iter().enumerate() {
        let value = verts
            .iter()
            .map(|&u| dm.get(u, next))
            .fold(diameter, f64::max);
        verts.push(next);
        cells.push((
            Cell::Simplex(Simplex { vertices: verts.clone() }),
            value,
        ));
        if verts.len() <= max_dim {
            let narrowed: Vec<usize> = candidates[(pos + 1)..]
                .iter()
                .copied()
                .filter(|&c| neighbors[next].binary_search(&c).is_ok())
                .collect();
            expand(dm, neighbors, max_dim, verts, value, &narrowed, cells);
        }
        verts.pop();
    }
}
