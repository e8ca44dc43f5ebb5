//! Clique (flag) filtration of a weighted graph.

use crate::error::Result;

use super::{Cell, Filtration, ScaleConvention, Simplex, WeightedGraph};

/// Builds the clique filtration: one simplex per clique of size
/// `<= max_dim + 1`, entering at the largest weight among its member
/// edges; vertices enter at 0. Zero-weight edges are allowed and enter
/// at 0. On a complete graph with metric weights this coincides with the
/// Rips filtration of the same metric.
pub fn clique_filtration(g: &WeightedGraph, max_dim: usize) -> Result<Filtration> {
    let n = g.n;
    // Dense weight table for clique-value lookups; NaN marks absence.
    let mut weight = vec![f64::NAN; n * n];
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(i, j, w) in g.edges() {
        weight[i * n + j] = w;
        weight[j * n + i] = w;
        adjacency[i].push(j);
        adjacency[j].push(i);
    }
    for adj in &mut adjacency {
        adj.sort_unstable();
    }

    let mut cells: Vec<(Cell, f64)> = Vec::new();
    for v in 0..n {
        cells.push((Cell::Simplex(Simplex::new(vec![v])?), 0.0));
    }
    if max_dim == 0 {
        return Filtration::new(cells, ScaleConvention::Diameter);
    }

    // Grow cliques vertex by vertex in increasing index order; the
    // extension set is the intersection of the upper neighborhoods of the
    // current members.
    let mut clique: Vec<usize> = Vec::new();
    for v in 0..n {
        clique.push(v);
        let upper: Vec<usize> = adjacency[v].iter().copied().filter(|&u| u > v).collect();
        grow(&weight, &adjacency, n, max_dim, &mut clique, 0.0, upper, &mut cells);
        clique.pop();
    }
    Filtration::new(cells, ScaleConvention::Diameter)
}

#[allow(clippy::too_many_arguments)]
fn grow(
    weight: &[f64],
    adjacency: &[Vec<usize>],
    n: usize,
    max_dim: usize,
    clique: &mut Vec<usize>,
    value: f64,
    extensions: Vec<usize>,
    cells: &mut Vec<(Cell, f64)>,
) {
    for (pos, &next) in extensions.iter().enumerate() {
        let entry = clique
            .iter()
            .map(|&u| weight[u * n + next])
            .fold(value, f64::max);
        clique.push(next);
        let simplex = Simplex::new(clique.clone()).expect("clique vertices are distinct");
        cells.push((Cell::Simplex(simplex), entry));
        if clique.len() <= max_dim {
            let narrowed: Vec<usize> = extensions[(pos + 1)..]
                .iter()
                .copied()
                .filter(|&c| adjacency[next].binary_search(&c).is_ok())
                .collect();
            grow(weight, adjacency, n, max_dim, clique, entry, narrowed, cells);
        }
        clique.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_enters_at_max_weight() {
        let g = WeightedGraph::new(3, vec![(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)]).unwrap();
        let f = clique_filtration(&g, 2).unwrap();
        let (_, value) = f.cells().find(|(c, _)| c.dim() == 2).unwrap();
        assert_eq!(*value, 3.0);
    }

    #[test]
    fn edgeless_graph_is_vertices_only() {
        let g = WeightedGraph::new(4, vec![]).unwrap();
        let f = clique_filtration(&g, 3).unwrap();
        assert_eq!(f.len(), 4);
        assert!(f.cells().all(|(c, _)| c.dim() == 0));
    }

    #[test]
    fn zero_weight_edges_enter_at_zero() {
        let g = WeightedGraph::new(2, vec![(0, 1, 0.0)]).unwrap();
        let f = clique_filtration(&g, 1).unwrap();
        let (_, value) = f.cells().find(|(c, _)| c.dim() == 1).unwrap();
        assert_eq!(*value, 0.0);
    }
}
