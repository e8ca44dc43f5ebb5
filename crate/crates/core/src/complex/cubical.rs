//! Sublevel-set cubical filtration of a scalar grid.

use crate::error::Result;

use super::{Cell, Cube, Filtration, ScalarGrid, ScaleConvention};

/// Builds the sublevel-set filtration of a pixel/voxel grid. Each top
/// cube enters at its scalar value; every lower-dimensional cube enters at
/// the minimum value among the top cubes containing it (the lower-star
/// convention on the value-per-top-cell model).
pub fn cubical_filtration(grid: &ScalarGrid) -> Result<Filtration> {
    let ambient = grid.dims.len();
    let full_mask: u8 = (1 << ambient) - 1;
    let mut dims3 = [1usize; 3];
    dims3[..ambient].copy_from_slice(&grid.dims);
    // Vertex-grid strides (one more vertex than cells per axis).
    let mut strides = [0u32; 3];
    let mut acc = 1u32;
    for a in 0..ambient {
        strides[a] = acc;
        acc *= (dims3[a] + 1) as u32;
    }

    let mut cells: Vec<(Cell, f64)> = Vec::new();
    for mask in 0..=full_mask {
        // Base coordinate ranges: an axis extended by the cube stops one
        // short of the last vertex line.
        let limit = |a: usize| -> usize {
            if a >= ambient {
                return 1;
            }
            if mask & (1 << a) != 0 {
                dims3[a]
            } else {
                dims3[a] + 1
            }
        };
        for z in 0..limit(2) {
            for y in 0..limit(1) {
                for x in 0..limit(0) {
                    let cube = Cube {
                        base: [x as u32, y as u32, z as u32],
                        mask,
                        ambient: ambient as u8,
                        strides,
                    };
                    let value = min_over_top_cofaces(grid, &dims3, &cube, full_mask);
                    cells.push((Cell::Cube(cube), value));
                }
            }
        }
    }
    Filtration::new(cells, ScaleConvention::Sublevel)
}

/// Minimum grid value among the top cubes containing `cube`. For a top
/// cube this is its own value.
fn min_over_top_cofaces(grid: &ScalarGrid, dims3: &[usize; 3], cube: &Cube, full_mask: u8) -> f64 {
    let ambient = grid.dims.len();
    if cube.mask == full_mask {
        let coords: Vec<usize> = (0..ambient).map(|a| cube.base[a] as usize).collect();
        return grid.value_at(&coords);
    }
    // Candidate top-cell coordinates per axis: the base line itself when
    // the cube extends along the axis, otherwise the cells on either side.
    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(ambient);
    for a in 0..ambient {
        let b = cube.base[a] as usize;
        if cube.mask & (1 << a) != 0 {
            candidates.push(vec![b]);
        } else {
            let mut c = Vec::with_capacity(2);
            if b > 0 {
                c.push(b - 1);
            }
            if b < dims3[a] {
                c.push(b);
            }
            candidates.push(c);
        }
    }
    let mut min = f64::INFINITY;
    let mut coords = vec![0usize; ambient];
    enumerate_products(&candidates, &mut coords, 0, &mut |coords| {
        min = min.min(grid.value_at(coords));
    });
    min
}

fn enumerate_products(
    candidates: &[Vec<usize>],
    coords: &mut Vec<usize>,
    axis: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if axis == candidates.len() {
        visit(coords);
        return;
    }
    for &c in &candidates[axis] {
        coords[axis] = c;
        enumerate_products(candidates, coords, axis + 1, visit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_is_flat() {
        let grid = ScalarGrid::new(vec![2, 2], vec![3.0; 4]).unwrap();
        let f = cubical_filtration(&grid).unwrap();
        // 3x3 vertices, 12 edges, 4 squares.
        assert_eq!(f.len(), 9 + 12 + 4);
        assert!(f.cells().all(|(_, v)| *v == 3.0));
    }

    #[test]
    fn edge_takes_min_of_adjacent_pixels() {
        let grid = ScalarGrid::new(vec![2, 1], vec![1.0, 5.0]).unwrap();
        let f = cubical_filtration(&grid).unwrap();
        // The shared vertical edge between the two pixels takes value 1.
        let shared = f
            .cells()
            .find(|(c, _)| match c {
                Cell::Cube(q) => q.dim() == 1 && q.base == [1, 0, 0] && q.mask == 0b10,
                _ => false,
            })
            .unwrap();
        assert_eq!(shared.1, 1.0);
    }

    #[test]
    fn monotone_1d_grid() {
        let grid = ScalarGrid::new(vec![4, 1], vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let f = cubical_filtration(&grid).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for (_, v) in f.cells() {
            assert!(*v >= prev);
            prev = *v;
        }
        // A monotone path never disconnects: one essential component and
        // no finite dim-0 bars.
        let d = crate::persistence::diagrams(&f).unwrap();
        assert_eq!(d.count(0), 1);
        assert!(d.bars(0)[0].is_infinite());
        assert_eq!(d.count(1), 0);
    }

    #[test]
    fn three_d_grid_counts() {
        let grid = ScalarGrid::new(vec![2, 2, 2], (0..8).map(|v| v as f64).collect()).unwrap();
        let f = cubical_filtration(&grid).unwrap();
        // Vertices 27, edges 3*18=54, squares 3*12=36, cubes 8.
        assert_eq!(f.len(), 27 + 54 + 36 + 8);
        assert_eq!(f.max_dim(), 3);
    }
}
