//! File formats owned by the CLI: labels, image grids, edge lists, model
//! files, and signature-unit tables.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use tda_core::complex::{ScalarGrid, WeightedGraph};
use tda_core::vectorize::{Codebook, GmmModel, SignatureUnit};

/// Labels CSV: one `id,label` pair per line, `#` comments allowed.
pub fn read_labels(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut labels = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line == "id,label" {
            continue;
        }
        let Some((id, label)) = line.split_once(',') else {
            bail!("labels line {} is not `id,label`: {line:?}", idx + 1);
        };
        labels.insert(id.trim().to_string(), label.trim().to_string());
    }
    if labels.is_empty() {
        bail!("no labels found in {}", path.display());
    }
    Ok(labels)
}

/// Image grid CSV: each non-comment line is one row of scalar values;
/// all rows must have equal length. Produces a 2D grid with x varying
/// fastest.
pub fn read_grid(path: &Path) -> Result<ScalarGrid> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .map(|f| {
                f.parse::<f64>()
                    .with_context(|| format!("bad value {f:?} at line {}", idx + 1))
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                bail!("grid row {} has {} values, expected {}", idx + 1, row.len(), first.len());
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("empty grid in {}", path.display());
    }
    let nx = rows[0].len();
    let ny = rows.len();
    let values: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(ScalarGrid::new(vec![nx, ny], values)?)
}

/// Weighted edge list: `i j weight` per line, vertices are 0-based
/// indices, vertex count is one past the largest index.
pub fn read_graph(path: &Path) -> Result<WeightedGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut max_vertex = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            bail!("edge line {} is not `i j weight`: {line:?}", idx + 1);
        }
        let i: usize = fields[0].parse().with_context(|| format!("line {}", idx + 1))?;
        let j: usize = fields[1].parse().with_context(|| format!("line {}", idx + 1))?;
        let w: f64 = fields[2].parse().with_context(|| format!("line {}", idx + 1))?;
        max_vertex = max_vertex.max(i).max(j);
        edges.push((i, j, w));
    }
    Ok(WeightedGraph::new(max_vertex + 1, edges)?)
}

/// Fitted-model file written by `tda fit`.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelFile {
    Codebook(Codebook),
    Gmm(GmmModel),
}

pub fn read_model(path: &Path) -> Result<ModelFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing model {}", path.display()))
}

/// Signature units CSV: `mu0,mu1,sigma0,sigma1,upsilon` per line.
pub fn read_units(path: &Path) -> Result<Vec<SignatureUnit>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut units = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad unit value {f:?} at line {}", idx + 1))
            })
            .collect::<Result<_>>()?;
        if fields.len() != 5 {
            bail!(
                "unit line {} needs mu0,mu1,sigma0,sigma1,upsilon",
                idx + 1
            );
        }
        let unit = SignatureUnit {
            mu: (fields[0], fields[1]),
            sigma: (fields[2], fields[3]),
            upsilon: fields[4],
        };
        unit.validate()?;
        units.push(unit);
    }
    if units.is_empty() {
        bail!("no units found in {}", path.display());
    }
    Ok(units)
}
