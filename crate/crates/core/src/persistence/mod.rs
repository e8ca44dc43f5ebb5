//! Persistent homology over Z2 by boundary-matrix column reduction.
//!
//! [`boundary_matrix`] extracts the sparse boundary operator from a
//! [`Filtration`], [`reduce`] runs the standard left-to-right column
//! reduction with the clearing ("twist") optimization, and [`diagrams`]
//! turns the resulting pairing into per-dimension persistence diagrams.
//! [`oracle::oracle_betti`] recomputes Betti numbers by dense GF(2) rank
//! for cross-checking the whole chain.

pub mod oracle;

use crate::complex::Filtration;
use crate::error::{Error, Result};
use crate::numfmt;

/// Sparse Z2 boundary matrix in filtration order: column `j` holds the
/// (sorted) filtration indices of the facets of cell `j`. Indices are
/// stored as `u32`; filtrations beyond 2^32 cells are far outside this
/// crate's scale.
#[derive(Debug, Clone)]
pub struct BoundaryMatrixZ2 {
    columns: Vec<Vec<u32>>,
    dims: Vec<usize>,
}

impl BoundaryMatrixZ2 {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.columns[j]
    }

    pub fn dim(&self, j: usize) -> usize {
        self.dims[j]
    }
}

/// Builds the boundary matrix of a filtration. Errors if some facet is
/// missing from the filtration (which [`Filtration`] construction already
/// rules out for its own outputs).
pub fn boundary_matrix(f: &Filtration) -> Result<BoundaryMatrixZ2> {
    let mut columns = Vec::with_capacity(f.len());
    let mut dims = Vec::with_capacity(f.len());
    for (cell, _) in f.cells() {
        let mut col: Vec<u32> = cell
            .facets()
            .into_iter()
            .map(|facet| {
                f.position(&facet).map(|i| i as u32).ok_or_else(|| {
                    Error::InvalidFiltration(format!(
                        "face {:?} missing from filtration",
                        facet.vertex_ids()
                    ))
                })
            })
            .collect::<Result<_>>()?;
        col.sort_unstable();
        columns.push(col);
        dims.push(cell.dim());
    }
    Ok(BoundaryMatrixZ2 { columns, dims })
}

/// The output of reduction: birth/death index pairs (including
/// zero-persistence pairs) plus the indices that never die.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    pub pairs: Vec<(usize, usize)>,
    pub unpaired: Vec<usize>,
}

/// Standard left-to-right column reduction with clearing: dimensions are
/// processed from high to low, and a column whose index was already used
/// as a pivot row (a known birth) is zeroed without work. The pairing is
/// identical to [`reduce_plain`].
pub fn reduce(m: &BoundaryMatrixZ2) -> Pairing {
    let n = m.len();
    let max_dim = m.dims.iter().copied().max().unwrap_or(0);
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); max_dim + 1];
    for j in 0..n {
        by_dim[m.dims[j]].push(j);
    }

    let mut cols: Vec<Vec<u32>> = m.columns.clone();
    let mut pivot_owner: Vec<u32> = vec![u32::MAX; n];
    let mut cleared: Vec<bool> = vec![false; n];
    let mut pairs = Vec::new();
    let mut scratch = Vec::new();

    for d in (1..=max_dim).rev() {
        for &j in &by_dim[d] {
            if cleared[j] {
                cols[j].clear();
                continue;
            }
            reduce_column(&mut cols, &mut scratch, &pivot_owner, j);
            if let Some(&low) = cols[j].last() {
                pivot_owner[low as usize] = j as u32;
                cleared[low as usize] = true;
                pairs.push((low as usize, j));
            }
        }
    }
    finish_pairing(pairs, n)
}

/// Plain left-to-right reduction without clearing; kept as the
/// independent route for cross-checking `reduce`.
pub fn reduce_plain(m: &BoundaryMatrixZ2) -> Pairing {
    let n = m.len();
    let mut cols: Vec<Vec<u32>> = m.columns.clone();
    let mut pivot_owner: Vec<u32> = vec![u32::MAX; n];
    let mut pairs = Vec::new();
    let mut scratch = Vec::new();
    for j in 0..n {
        reduce_column(&mut cols, &mut scratch, &pivot_owner, j);
        if let Some(&low) = cols[j].last() {
            pivot_owner[low as usize] = j as u32;
            pairs.push((low as usize, j));
        }
    }
    finish_pairing(pairs, n)
}

/// Adds earlier columns into column `j` until its pivot is unclaimed or
/// the column vanishes.
fn reduce_column(
    cols: &mut [Vec<u32>],
    scratch: &mut Vec<u32>,
    pivot_owner: &[u32],
    j: usize,
) {
    while let Some(&low) = cols[j].last() {
        let k = pivot_owner[low as usize];
        if k == u32::MAX {
            break;
        }
        // k was processed before j, so k < j.
        let (left, right) = cols.split_at_mut(j);
        add_z2(&mut right[0], &left[k as usize], scratch);
    }
}

/// Symmetric difference of two sorted index lists (Z2 column addition),
/// written through a scratch buffer to avoid reallocation.
fn add_z2(target: &mut Vec<u32>, other: &[u32], scratch: &mut Vec<u32>) {
    scratch.clear();
    scratch.reserve(target.len() + other.len());
    let (mut a, mut b) = (0, 0);
    while a < target.len() && b < other.len() {
        match target[a].cmp(&other[b]) {
            std::cmp::Ordering::Less => {
                scratch.push(target[a]);
                a += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(other[b]);
                b += 1;
            }
            std::cmp::Ordering::Equal => {
                a += 1;
                b += 1;
            }
        }
    }
    scratch.extend_from_slice(&target[a..]);
    scratch.extend_from_slice(&other[b..]);
    std::mem::swap(target, scratch);
}

fn finish_pairing(mut pairs: Vec<(usize, usize)>, n: usize) -> Pairing {
    pairs.sort_unstable();
    let mut used = vec![false; n];
    for &(b, d) in &pairs {
        used[b] = true;
        used[d] = true;
    }
    let unpaired = (0..n).filter(|&i| !used[i]).collect();
    Pairing { pairs, unpaired }
}

/// One persistence interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Bar {
    pub birth: f64,
    /// `f64::INFINITY` for essential classes.
    pub death: f64,
    pub birth_index: usize,
    pub death_index: Option<usize>,
}

impl Bar {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }
}

/// Per-dimension persistence diagrams of one filtration.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagramSet {
    bars: Vec<Vec<Bar>>,
    max_value: f64,
}

impl PersistenceDiagramSet {
    pub fn from_bars(bars: Vec<Vec<Bar>>, max_value: f64) -> Self {
        PersistenceDiagramSet { bars, max_value }
    }

    /// Bars of dimension `k`; empty when the dimension was not computed.
    pub fn bars(&self, k: usize) -> &[Bar] {
        self.bars.get(k).map(|b| b.as_slice()).unwrap_or(&[])
    }

    /// Highest dimension with storage (even if empty).
    pub fn max_dim(&self) -> usize {
        self.bars.len().saturating_sub(1)
    }

    /// Largest filtration value of the source complex; vectorizers use it
    /// to cap infinite deaths.
    pub fn max_value(&self) -> f64 {
        self.max_value
    }

    pub fn count(&self, k: usize) -> usize {
        self.bars(k).len()
    }

    /// Dimension-`k` bars with infinite deaths capped at the maximum
    /// filtration value; what the kernels and metrics consume.
    pub fn capped_bars(&self, k: usize) -> Vec<Bar> {
        self.bars(k)
            .iter()
            .map(|b| Bar {
                death: if b.death.is_finite() { b.death } else { self.max_value },
                ..b.clone()
            })
            .collect()
    }

    /// Diagram CSV: header `dim,birth,death`, death `inf` for essential
    /// bars, values printed with 9 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,birth,death\n");
        for (k, bars) in self.bars.iter().enumerate() {
            for bar in bars {
                out.push_str(&format!(
                    "{k},{},{}\n",
                    numfmt::sig_digits(bar.birth, 9),
                    numfmt::sig_digits(bar.death, 9)
                ));
            }
        }
        out
    }

    /// Parses the CSV form written by [`Self::to_csv`]. Index fields are
    /// not serialized and come back as zero.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut bars: Vec<Vec<Bar>> = Vec::new();
        let mut max_value: f64 = 0.0;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("dim") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::RaggedRow {
                    line: idx + 1,
                    expected: 3,
                    found: fields.len(),
                });
            }
            let parse = |tok: &str| {
                numfmt::parse_float(tok).ok_or_else(|| Error::NonNumeric {
                    line: idx + 1,
                    token: tok.to_string(),
                })
            };
            let dim = fields[0].trim().parse::<usize>().map_err(|_| Error::NonNumeric {
                line: idx + 1,
                token: fields[0].to_string(),
            })?;
            let birth = parse(fields[1])?;
            let death = parse(fields[2])?;
            while bars.len() <= dim {
                bars.push(Vec::new());
            }
            max_value = max_value.max(birth);
            if death.is_finite() {
                max_value = max_value.max(death);
            }
            bars[dim].push(Bar {
                birth,
                death,
                birth_index: 0,
                death_index: None,
            });
        }
        Ok(PersistenceDiagramSet { bars, max_value })
    }
}

/// Reduces a filtration and maps the pairing to value-space bars.
/// Zero-persistence pairs are dropped; unpaired cells become bars with
/// infinite death.
pub fn diagrams(f: &Filtration) -> Result<PersistenceDiagramSet> {
    let matrix = boundary_matrix(f)?;
    let pairing = reduce(&matrix);
    Ok(pairing_to_diagrams(f, &pairing))
}

/// Value-space diagrams from an index pairing.
pub fn pairing_to_diagrams(f: &Filtration, pairing: &Pairing) -> PersistenceDiagramSet {
    let mut bars: Vec<Vec<Bar>> = vec![Vec::new(); f.max_dim() + 1];
    for &(b, d) in &pairing.pairs {
        let birth = f.value(b);
        let death = f.value(d);
        if death > birth {
            bars[f.cell(b).dim()].push(Bar {
                birth,
                death,
                birth_index: b,
                death_index: Some(d),
            });
        }
    }
    for &i in &pairing.unpaired {
        bars[f.cell(i).dim()].push(Bar {
            birth: f.value(i),
            death: f64::INFINITY,
            birth_index: i,
            death_index: None,
        });
    }
    for dim_bars in &mut bars {
        dim_bars.sort_by(|a, b| {
            (a.birth, a.death, a.birth_index)
                .partial_cmp(&(b.birth, b.death, b.birth_index))
                .unwrap()
        });
    }
    PersistenceDiagramSet {
        bars,
        max_value: f.max_value(),
    }
}

/// The p-persistent Betti number read off a diagram: bars of dimension
/// `k` born at or before `l` and still alive after `l + p` (infinite
/// deaths count).
pub fn persistent_betti(d: &PersistenceDiagramSet, k: usize, l: f64, p: f64) -> usize {
    d.bars(k)
        .iter()
        .filter(|bar| bar.birth <= l && bar.death > l + p)
        .count()
}
