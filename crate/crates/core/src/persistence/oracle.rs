//! Dense GF(2) Betti-number oracle.
//!
//! Recomputes Betti numbers of a sublevel complex from scratch as
//! `nullity(boundary_k) - rank(boundary_{k+1})` with bitset Gaussian
//! elimination. Deliberately independent of the column-reduction path in
//! the parent module; intended for complexes of up to a few hundred
//! cells.

use crate::complex::Filtration;
use crate::persistence::boundary_matrix;

/// Betti number of dimension `k` of the subcomplex of cells with value
/// `<= t`.
pub fn oracle_betti(f: &Filtration, k: usize, t: f64) -> usize {
    let m = boundary_matrix(f).expect("filtration is face-closed");
    let included: Vec<bool> = (0..f.len()).map(|i| f.value(i) <= t).collect();
    // Filtrations are monotone, so the sublevel set is face-closed.
    let cells_k = (0..f.len())
        .filter(|&i| included[i] && m.dim(i) == k)
        .count();
    let rank_dk = if k == 0 {
        0
    } else {
        restricted_rank(&m, &included, k)
    };
    let rank_dk1 = restricted_rank(&m, &included, k + 1);
    cells_k - rank_dk - rank_dk1
}

/// Rank over GF(2) of the boundary operator from dimension `dim` cells,
/// restricted to the included cells.
fn restricted_rank(m: &crate::persistence::BoundaryMatrixZ2, included: &[bool], dim: usize) -> usize {
    let columns: Vec<Vec<u32>> = (0..m.len())
        .filter(|&j| included[j] && m.dim(j) == dim)
        .map(|j| m.column(j).to_vec())
        .collect();
    if columns.is_empty() {
        return 0;
    }
    let n_rows = m.len();
    let words = n_rows.div_ceil(64);
    let mut bit_cols: Vec<Vec<u64>> = columns
        .iter()
        .map(|col| {
            let mut bits = vec![0u64; words];
            for &r in col {
                let r = r as usize;
                bits[r / 64] |= 1 << (r % 64);
            }
            bits
        })
        .collect();

    // Column elimination: repeatedly use the lowest set bit of each new
    // independent column as a pivot.
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (column index, pivot row)
    let mut rank = 0;
    for j in 0..bit_cols.len() {
        loop {
            let Some(pivot_row) = lowest_bit(&bit_cols[j]) else {
                break;
            };
            match pivots.iter().find(|&&(_, r)| r == pivot_row) {
                Some(&(owner, _)) => {
                    let (a, b) = split_two(&mut bit_cols, owner, j);
                    for (x, y) in a.iter().zip(b.iter_mut()) {
                        *y ^= *x;
                    }
                }
                None => {
                    pivots.push((j, pivot_row));
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn lowest_bit(bits: &[u64]) -> Option<usize> {
    for (w, &word) in bits.iter().enumerate() {
        if word != 0 {
            return Some(w * 64 + word.trailing_zeros() as usize);
        }
    }
    None
}

fn split_two<T>(v: &mut [T], a: usize, b: usize) -> (&T, &mut T) {
    assert!(a != b);
    if a < b {
        let (left, right) = v.split_at_mut(b);
        (&left[a], &mut right[0])
    } else {
        let (left, right) = v.split_at_mut(a);
        (&right[0], &mut left[b])
    }
}
