//! Filtered cell complexes: simplicial (Rips, alpha, clique) and cubical.
//!
//! A [`Filtration`] is the single currency consumed by the reduction in
//! [`crate::persistence`]: an ordered list of cells, each with a value, in
//! which faces always precede cofaces and values never decrease.

mod alpha;
mod clique;
mod cubical;
pub(crate) mod delaunay;
mod rips;

pub use alpha::alpha_filtration;
pub use clique::clique_filtration;
pub use cubical::cubical_filtration;
pub use rips::rips_filtration;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hashutil::FxHashMap;

/// An abstract simplex: a strictly increasing list of vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Simplex {
    vertices: Vec<usize>,
}

impl Simplex {
    /// Builds a simplex from vertex indices; sorts them and rejects
    /// duplicates.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidInput("simplex needs at least one vertex".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("simplex has repeated vertices".into()));
        }
        Ok(Simplex { vertices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// The codimension-1 faces (each vertex dropped in turn).
    pub fn facets(&self) -> Vec<Simplex> {
        if self.dim() == 0 {
            return Vec::new();
        }
        (0..self.vertices.len())
            .map(|skip| {
                let vertices = self
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                Simplex { vertices }
            })
            .collect()
    }
}

/// An elementary cube in a 2D or 3D grid: the product of per-axis
/// intervals anchored at `base` (vertex-grid coordinates); bit `a` of
/// `mask` says the cube extends one unit along axis `a`. `strides` are the
/// vertex-grid strides, carried so corner vertex ids can be recovered
/// without grid context.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cube {
    pub base: [u32; 3],
    pub mask: u8,
    pub ambient: u8,
    pub strides: [u32; 3],
}

impl Cube {
    pub fn dim(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// The 2*dim facet cubes (each extended axis collapsed to either end).
    pub fn facets(&self) -> Vec<Cube> {
        let mut out = Vec::with_capacity(2 * self.dim());
        for axis in 0..self.ambient {
            if self.mask & (1 << axis) == 0 {
                continue;
            }
            let mask = self.mask & !(1 << axis);
            out.push(Cube { mask, ..self.clone() });
            let mut shifted = self.base;
            shifted[axis as usize] += 1;
            out.push(Cube {
                base: shifted,
                mask,
                ..self.clone()
            });
        }
        out
    }

    /// Corner vertex ids in the flattened vertex grid, sorted.
    pub fn corners(&self) -> Vec<usize> {
        let extended: Vec<usize> = (0..self.ambient as usize)
            .filter(|a| self.mask & (1 << a) != 0)
            .collect();
        let mut out = Vec::with_capacity(1 << extended.len());
        for combo in 0..(1usize << extended.len()) {
            let mut coords = self.base;
            for (bit, &axis) in extended.iter().enumerate() {
                if combo & (1 << bit) != 0 {
                    coords[axis] += 1;
                }
            }
            let id: u64 = (0..self.ambient as usize)
                .map(|a| coords[a] as u64 * self.strides[a] as u64)
                .sum();
            out.push(id as usize);
        }
        out.sort_unstable();
        out
    }
}

/// A cell of a filtered complex: simplex or elementary cube.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cell {
    Simplex(Simplex),
    Cube(Cube),
}

impl Cell {
    pub fn dim(&self) -> usize {
        match self {
            Cell::Simplex(s) => s.dim(),
            Cell::Cube(c) => c.dim(),
        }
    }

    pub fn facets(&self) -> Vec<Cell> {
        match self {
            Cell::Simplex(s) => s.facets().into_iter().map(Cell::Simplex).collect(),
            Cell::Cube(c) => c.facets().into_iter().map(Cell::Cube).collect(),
        }
    }

    /// Vertex ids used by the dump format and the lexicographic tie-break.
    pub fn vertex_ids(&self) -> Vec<usize> {
        match self {
            Cell::Simplex(s) => s.vertices().to_vec(),
            Cell::Cube(c) => c.corners(),
        }
    }
}

/// How the filtration values of a complex are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleConvention {
    /// Values are simplex diameters (distance thresholds).
    Diameter,
    /// Values are circumradii of the alpha complex.
    Circumradius,
    /// Values are sublevel thresholds of a scalar field.
    Sublevel,
}

/// An ordered filtered complex. Construction sorts cells by
/// `(value, dimension, lexicographic vertex list)` and validates the
/// contract: finite values `>= 0`, no duplicate cells, and every facet
/// present earlier in the order (which also forces values monotone along
/// faces).
#[derive(Debug, Clone)]
pub struct Filtration {
    cells: Vec<(Cell, f64)>,
    index: FxHashMap<Cell, usize>,
    max_dim: usize,
    scale_convention: ScaleConvention,
}

impl Filtration {
    pub fn new(mut cells: Vec<(Cell, f64)>, scale_convention: ScaleConvention) -> Result<Self> {
        for (cell, value) in &cells {
            if !value.is_finite() || *value < 0.0 {
                return Err(Error::InvalidFiltration(format!(
                    "cell {:?} has invalid value {value}",
                    cell.vertex_ids()
                )));
            }
        }
        cells.sort_by(|a, b| Self::order(a, b));
        let mut index: FxHashMap<Cell, usize> = FxHashMap::default();
        index.reserve(cells.len());
        for (i, (cell, _)) in cells.iter().enumerate() {
            if index.insert(cell.clone(), i).is_some() {
                return Err(Error::InvalidFiltration(format!(
                    "duplicate cell {:?}",
                    cell.vertex_ids()
                )));
            }
        }
        for (i, (cell, _)) in cells.iter().enumerate() {
            for facet in cell.facets() {
                match index.get(&facet) {
                    Some(&j) if j < i => {}
                    Some(_) => {
                        return Err(Error::InvalidFiltration(format!(
                            "face {:?} of {:?} appears later in the order",
                            facet.vertex_ids(),
                            cell.vertex_ids()
                        )))
                    }
                    None => {
                        return Err(Error::InvalidFiltration(format!(
                            "face {:?} of {:?} is missing",
                            facet.vertex_ids(),
                            cell.vertex_ids()
                        )))
                    }
                }
            }
        }
        let max_dim = cells.iter().map(|(c, _)| c.dim()).max().unwrap_or(0);
        Ok(Filtration {
            cells,
            index,
            max_dim,
            scale_convention,
        })
    }

    /// Position of a cell in the filtration order.
    pub fn position(&self, cell: &Cell) -> Option<usize> {
        self.index.get(cell).copied()
    }

    fn order(a: &(Cell, f64), b: &(Cell, f64)) -> std::cmp::Ordering {
        a.1
            .partial_cmp(&b.1)
            .expect("filtration values are finite")
            .then_with(|| a.0.dim().cmp(&b.0.dim()))
            .then_with(|| a.0.vertex_ids().cmp(&b.0.vertex_ids()))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i].0
    }

    pub fn value(&self, i: usize) -> f64 {
        self.cells[i].1
    }

    pub fn cells(&self) -> impl Iterator<Item = &(Cell, f64)> {
        self.cells.iter()
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn max_value(&self) -> f64 {
        self.cells.last().map(|(_, v)| *v).unwrap_or(0.0)
    }

    pub fn scale_convention(&self) -> ScaleConvention {
        self.scale_convention
    }

    /// Debug dump: one cell per line, `dim;v0,v1,...;value`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (cell, value) in &self.cells {
            let ids: Vec<String> = cell.vertex_ids().iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{};{};{}", cell.dim(), ids.join(","), value);
        }
        out
    }
}

#[cfg(test)]
pub(crate) fn simplex(vertices: &[usize]) -> Cell {
    Cell::Simplex(Simplex::new(vertices.to_vec()).unwrap())
}

/// An undirected graph with non-negative edge weights; substrate for
/// [`clique_filtration`].
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    pub n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for (i, j, w) in edges {
            if i == j {
                return Err(Error::InvalidInput(format!("self-loop at vertex {i}")));
            }
            if i >= n || j >= n {
                return Err(Error::InvalidInput(format!("edge ({i},{j}) out of range")));
            }
            if !(w >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "edge ({i},{j}) has negative or NaN weight"
                )));
            }
            let key = (i.min(j), i.max(j));
            if !seen.insert(key) {
                return Err(Error::InvalidInput(format!(
                    "duplicate edge ({},{})",
                    key.0, key.1
                )));
            }
            normalized.push((key.0, key.1, w));
        }
        Ok(WeightedGraph { n, edges: normalized })
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }
}

/// A scalar field on a 2D or 3D grid of pixels/voxels, row-major with the
/// first axis fastest.
#[derive(Debug, Clone)]
pub struct ScalarGrid {
    pub dims: Vec<usize>,
    pub values: Vec<f64>,
}

impl ScalarGrid {
    pub fn new(dims: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if dims.len() != 2 && dims.len() != 3 {
            return Err(Error::InvalidInput("grid must be 2D or 3D".into()));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidInput("grid dims must be positive".into()));
        }
        let expected: usize = dims.iter().product();
        if values.len() != expected {
            return Err(Error::InvalidInput(format!(
                "expected {expected} values, got {}",
                values.len()
            )));
        }
        Ok(ScalarGrid { dims, values })
    }

    pub fn value_at(&self, coords: &[usize]) -> f64 {
        let mut idx = 0;
        let mut stride = 1;
        for (a, &c) in coords.iter().enumerate() {
            idx += c * stride;
            stride *= self.dims[a];
        }
        self.values[idx]
    }
}
