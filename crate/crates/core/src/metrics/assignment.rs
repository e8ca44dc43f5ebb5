//! Assignment solvers behind the diagram metrics: an exact O(n^3)
//! Hungarian algorithm with potentials for minimum-cost perfect matching,
//! and an augmenting-path maximum bipartite matching for the bottleneck
//! feasibility test.

/// Minimum-cost perfect matching on a square cost matrix (row-major
/// `n x n`). Returns the total cost and the column assigned to each row.
pub fn hungarian(cost: &[f64], n: usize) -> (f64, Vec<usize>) {
    assert_eq!(cost.len(), n * n);
    if n == 0 {
        return (0.0, Vec::new());
    }
    const INF: f64 = f64::INFINITY;
    // Shortest-augmenting-path formulation with row/column potentials;
    // arrays are 1-indexed with column 0 as the virtual source.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = INF;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        // Unroll the augmenting path.
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if matched_row[j] > 0 {
            assignment[matched_row[j] - 1] = j - 1;
        }
    }
    let total = (0..n).map(|i| cost[i * n + assignment[i]]).sum();
    (total, assignment)
}

/// Maximum bipartite matching size by repeated augmenting paths.
/// `adjacency[l]` lists the right vertices reachable from left vertex `l`.
pub fn max_bipartite_matching(adjacency: &[Vec<usize>], n_right: usize) -> usize {
    let mut match_right: Vec<Option<usize>> = vec![None; n_right];
    let mut matched = 0;
    let mut seen = vec![false; n_right];
    for l in 0..adjacency.len() {
        seen.iter_mut().for_each(|s| *s = false);
        if try_augment(adjacency, l, &mut seen, &mut match_right) {
            matched += 1;
        }
    }
    matched
}

fn try_augment(
    adjacency: &[Vec<usize>],
    l: usize,
    seen: &mut [bool],
    match_right: &mut [Option<usize>],
) -> bool {
    for &r in &adjacency[l] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        let free = match match_right[r] {
            None => true,
            Some(other) => try_augment(adjacency, other, seen, match_right),
        };
        if free {
            match_right[r] = Some(l);
            return true;
        }
    }
    false
}
