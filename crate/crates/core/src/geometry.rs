//! Point-cloud ingestion and synthetic shape generation.
//!
//! Point clouds come from three places: delimiter-tolerant CSV dumps, the
//! alpha-carbon trace of a PDB file, and seeded synthetic generators
//! (circle, sphere, torus, Gaussian clusters, and a protein-like helix).
//! All generators run on `ChaCha8Rng`, a portable counter-based generator,
//! so a [`ShapeSpec`] is a complete, reproducible description of its cloud.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// An ordered list of points in R^d with provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Vec<f64>>,
    pub dim: usize,
    pub label: Option<String>,
    pub source: String,
}

impl PointCloud {
    /// Builds a cloud and checks the invariants: at least one point, all
    /// points of equal dimension, all coordinates finite.
    pub fn new(points: Vec<Vec<f64>>, source: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("point cloud is empty".into()));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidInput("points must have dimension >= 1".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "point {i} has a non-finite coordinate"
                )));
            }
        }
        Ok(PointCloud {
            points,
            dim,
            label: None,
            source: source.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Euclidean distance between points `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(&self.points[i], &self.points[j])
    }

    /// Writes the cloud in the CSV point format (one comma-separated point
    /// per line).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let fields: Vec<String> = p.iter().map(|c| format!("{c}")).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Symmetric matrix of pairwise distances with zero diagonal.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    pub n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from raw entries, validating symmetry, zero
    /// diagonal and non-negativity.
    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::InvalidInput(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                let d = entries[i * n + j];
                if !(d >= 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "negative or NaN distance at ({i},{j})"
                    )));
                }
                if (d - entries[j * n + i]).abs() > 1e-12 * d.abs().max(1.0) {
                    return Err(Error::InvalidInput(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        Ok(DistanceMatrix { n, entries })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().cloned().fold(0.0, f64::max)
    }
}

/// Euclidean pairwise distances of a cloud.
pub fn distance_matrix(pc: &PointCloud) -> DistanceMatrix {
    let n = pc.len();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = pc.distance(i, j);
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    DistanceMatrix { n, entries }
}

/// The synthetic shapes the generator knows how to sample.
#[derive(Debug, Clone, PartialEq)]
pub enum ShapeKind {
    /// Circle of the given radius in the plane.
    Circle { radius: f64 },
    /// Sphere of the given radius in R^3.
    Sphere { radius: f64 },
    /// Torus with the given major (center-to-tube) and minor (tube) radii.
    Torus { major: f64, minor: f64 },
    /// `count` isotropic Gaussian blobs with centers `separation` apart
    /// along the first axis.
    Clusters { count: usize, separation: f64 },
    /// Protein-like helix: 3.8 length units between consecutive points and
    /// 3.6 points per turn, like an alpha-carbon backbone trace.
    Helix { radius: f64 },
}

/// A seeded recipe for a synthetic point cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub n: usize,
    /// Standard deviation of isotropic Gaussian noise added to each point.
    pub noise: f64,
    pub seed: u64,
}

/// Distance between consecutive points of the helix generator.
pub const HELIX_BOND_LENGTH: f64 = 3.8;
/// Points per helix turn.
pub const HELIX_POINTS_PER_TURN: f64 = 3.6;
/// Default helix radius; must stay below `3.8 / (2 sin(pi/3.6))` so the
/// rise per point is real.
pub const HELIX_DEFAULT_RADIUS: f64 = 2.3;

/// Samples a cloud from a [`ShapeSpec`]. Pure in its input: equal specs
/// produce bitwise-identical clouds.
pub fn generate_shape(spec: &ShapeSpec) -> Result<PointCloud> {
    if spec.n == 0 {
        return Err(Error::InvalidInput("sample count must be >= 1".into()));
    }
    if !(spec.noise >= 0.0) {
        return Err(Error::InvalidInput("noise must be >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(spec.n);
    match spec.kind {
        ShapeKind::Circle { radius } => {
            for _ in 0..spec.n {
                let theta: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                points.push(vec![radius * theta.cos(), radius * theta.sin()]);
            }
        }
        ShapeKind::Sphere { radius } => {
            // Uniform on the sphere: z uniform in [-1, 1], azimuth uniform.
            for _ in 0..spec.n {
                let z: f64 = rng.gen::<f64>() * 2.0 - 1.0;
                let phi: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                let r_xy = (1.0 - z * z).max(0.0).sqrt();
                points.push(vec![
                    radius * r_xy * phi.cos(),
                    radius * r_xy * phi.sin(),
                    radius * z,
                ]);
            }
        }
        ShapeKind::Torus { major, minor } => {
            // Uniform in parameter space (u along the tube center, v around
            // the tube), not area-uniform.
            for _ in 0..spec.n {
                let u: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                let v: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                let w = major + minor * v.cos();
                points.push(vec![w * u.cos(), w * u.sin(), minor * v.sin()]);
            }
        }
        ShapeKind::Clusters { count, separation } => {
            if count == 0 {
                return Err(Error::InvalidInput("cluster count must be >= 1".into()));
            }
            // Points are dealt round-robin; centers sit on the first axis.
            for i in 0..spec.n {
                let c = (i % count) as f64 * separation;
                points.push(vec![c, 0.0, 0.0]);
            }
        }
        ShapeKind::Helix { radius } => {
            let chord = 2.0 * radius * (std::f64::consts::PI / HELIX_POINTS_PER_TURN).sin();
            let rise2 = HELIX_BOND_LENGTH * HELIX_BOND_LENGTH - chord * chord;
            if rise2 <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "helix radius {radius} too large for bond length {HELIX_BOND_LENGTH}"
                )));
            }
            let rise = rise2.sqrt();
            let dtheta = std::f64::consts::TAU / HELIX_POINTS_PER_TURN;
            for i in 0..spec.n {
                let theta = dtheta * i as f64;
                points.push(vec![
                    radius * theta.cos(),
                    radius * theta.sin(),
                    rise * i as f64,
                ]);
            }
        }
    }
    if spec.noise > 0.0 {
        for p in &mut points {
            for c in p.iter_mut() {
                let g: f64 = StandardNormal.sample(&mut rng);
                *c += spec.noise * g;
            }
        }
    }
    let source = format!("generate_shape(seed={})", spec.seed);
    PointCloud::new(points, source)
}

/// Loads a point cloud from a CSV file: one point per line, fields
/// separated by commas or whitespace, `#`-prefixed lines are comments.
pub fn load_point_cloud_csv(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let pc = parse_point_cloud_csv(&text)?;
    Ok(PointCloud {
        source: path.display().to_string(),
        ..pc
    })
}

/// Parses CSV point-cloud text; see [`load_point_cloud_csv`].
pub fn parse_point_cloud_csv(text: &str) -> Result<PointCloud> {
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut expected = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let dim = *expected.get_or_insert(fields.len());
        if fields.len() != dim {
            return Err(Error::RaggedRow {
                line: line_no,
                expected: dim,
                found: fields.len(),
            });
        }
        let mut point = Vec::with_capacity(dim);
        for f in fields {
            let v: f64 = f.parse().map_err(|_| Error::NonNumeric {
                line: line_no,
                token: f.to_string(),
            })?;
            point.push(v);
        }
        points.push(point);
    }
    PointCloud::new(points, "csv")
}

/// Extracts the alpha-carbon trace from a PDB file.
///
/// Keeps ATOM records whose atom-name field (columns 13-16) is `CA` with a
/// blank or `'A'` alternate-location indicator, reading x, y, z from the
/// fixed columns 31-38, 39-46, 47-54. Only the first MODEL is read.
pub fn parse_pdb_ca(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut models_seen = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.starts_with("MODEL") {
            models_seen += 1;
            if models_seen > 1 {
                break;
            }
            continue;
        }
        if line.starts_with("ENDMDL") {
            break;
        }
        if !line.starts_with("ATOM") {
            continue;
        }
        let col = |a: usize, b: usize| -> &str {
            // 1-indexed inclusive PDB columns; short lines yield "".
            if line.len() >= a {
                &line[a - 1..b.min(line.len())]
            } else {
                ""
            }
        };
        if col(13, 16).trim() != "CA" {
            continue;
        }
        let alt_loc = col(17, 17);
        if !(alt_loc == " " || alt_loc == "A" || alt_loc.is_empty()) {
            continue;
        }
        let coord = |a: usize, b: usize| -> Result<f64> {
            let field = col(a, b);
            field.trim().parse().map_err(|_| Error::BadPdbCoordinate {
                line: line_no,
                field: field.to_string(),
            })
        };
        let x = coord(31, 38)?;
        let y = coord(39, 46)?;
        let z = coord(47, 54)?;
        points.push(vec![x, y, z]);
    }
    if points.is_empty() {
        return Err(Error::NoCaAtoms { path: path.into() });
    }
    let mut pc = PointCloud::new(points, path.display().to_string())?;
    pc.source = path.display().to_string();
    Ok(pc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_parse_basic() {
        let pc = parse_point_cloud_csv("0,0\n1,0\n0,1").unwrap();
        assert_eq!(pc.dim, 2);
        assert_eq!(pc.len(), 3);
    }

    #[test]
    fn csv_skips_comments_and_blank_lines() {
        let pc = parse_point_cloud_csv("# header\n\n0 0\n1\t0\n").unwrap();
        assert_eq!(pc.len(), 2);
        assert_eq!(pc.points[1], vec![1.0, 0.0]);
    }

    #[test]
    fn csv_ragged_row_reports_line() {
        let err = parse_point_cloud_csv("0,0\n1").unwrap_err();
        match err {
            Error::RaggedRow { line, .. } => assert_eq!(line, 2),
            other => panic!("expected RaggedRow, got {other:?}"),
        }
    }

    #[test]
    fn csv_non_numeric_reports_token() {
        let err = parse_point_cloud_csv("0,zero\n").unwrap_err();
        match err {
            Error::NonNumeric { line, token } => {
                assert_eq!(line, 1);
                assert_eq!(token, "zero");
            }
            other => panic!("expected NonNumeric, got {other:?}"),
        }
    }

    fn pdb_atom(serial: usize, name: &str, alt: &str, res_seq: usize, x: f64, y: f64, z: f64) -> String {
        // Fixed-column ATOM record; name occupies columns 13-16, altLoc 17.
        format!(
            "ATOM  {serial:>5} {name:<4}{alt}ALA A{res_seq:>4}    {x:>8.3}{y:>8.3}{z:>8.3}  1.00  0.00           C"
        )
    }

    #[test]
    fn pdb_keeps_only_ca() {
        let dir = std::env::temp_dir().join("tda_core_pdb_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("two_ca.pdb");
        let body = [
            pdb_atom(1, " N", " ", 1, 0.0, 0.0, 0.0),
            pdb_atom(2, " CA", " ", 1, 1.0, 2.0, 3.0),
            pdb_atom(3, " CB", " ", 1, 9.0, 9.0, 9.0),
            pdb_atom(4, " CA", " ", 2, 4.0, 5.0, 6.0),
        ]
        .join("\n");
        std::fs::write(&path, body).unwrap();
        let pc = parse_pdb_ca(&path).unwrap();
        assert_eq!(pc.len(), 2);
        assert_eq!(pc.points[0], vec![1.0, 2.0, 3.0]);
        assert_eq!(pc.points[1], vec![4.0, 5.0, 6.0]);
    }

    #[test]
    fn pdb_alt_loc_keeps_a_only() {
        let dir = std::env::temp_dir().join("tda_core_pdb_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("altloc.pdb");
        let body = [
            pdb_atom(1, " CA", "A", 1, 1.0, 0.0, 0.0),
            pdb_atom(2, " CA", "B", 1, 2.0, 0.0, 0.0),
        ]
        .join("\n");
        std::fs::write(&path, body).unwrap();
        let pc = parse_pdb_ca(&path).unwrap();
        assert_eq!(pc.len(), 1);
        assert_eq!(pc.points[0][0], 1.0);
    }

    #[test]
    fn pdb_reads_first_model_only() {
        let dir = std::env::temp_dir().join("tda_core_pdb_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("models.pdb");
        let body = [
            "MODEL        1".to_string(),
            pdb_atom(1, " CA", " ", 1, 1.0, 0.0, 0.0),
            pdb_atom(2, " CA", " ", 2, 2.0, 0.0, 0.0),
            "ENDMDL".to_string(),
            "MODEL        2".to_string(),
            pdb_atom(3, " CA", " ", 1, 9.0, 9.0, 9.0),
            "ENDMDL".to_string(),
        ]
        .join("\n");
        std::fs::write(&path, body).unwrap();
        let pc = parse_pdb_ca(&path).unwrap();
        assert_eq!(pc.len(), 2);
        assert_eq!(pc.points[1][0], 2.0);
    }

    #[test]
    fn pdb_without_ca_errors() {
        let dir = std::env::temp_dir().join("tda_core_pdb_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("no_ca.pdb");
        std::fs::write(&path, pdb_atom(1, " N", " ", 1, 0.0, 0.0, 0.0)).unwrap();
        assert!(matches!(parse_pdb_ca(&path), Err(Error::NoCaAtoms { .. })));
    }

    #[test]
    fn circle_points_lie_on_circle() {
        let spec = ShapeSpec {
            kind: ShapeKind::Circle { radius: 1.0 },
            n: 100,
            noise: 0.0,
            seed: 7,
        };
        let pc = generate_shape(&spec).unwrap();
        for p in &pc.points {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = ShapeSpec {
            kind: ShapeKind::Sphere { radius: 2.0 },
            n: 50,
            noise: 0.3,
            seed: 42,
        };
        let a = generate_shape(&spec).unwrap();
        let b = generate_shape(&spec).unwrap();
        assert_eq!(a.points, b.points);
    }

    #[test]
    fn helix_bond_lengths() {
        let spec = ShapeSpec {
            kind: ShapeKind::Helix {
                radius: HELIX_DEFAULT_RADIUS,
            },
            n: 10,
            noise: 0.0,
            seed: 0,
        };
        let pc = generate_shape(&spec).unwrap();
        for i in 0..pc.len() - 1 {
            assert!((pc.distance(i, i + 1) - HELIX_BOND_LENGTH).abs() < 1e-9);
        }
    }

    #[test]
    fn distance_matrix_unit_triangle() {
        let h = 3f64.sqrt() / 2.0;
        let pc = PointCloud::new(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]],
            "test",
        )
        .unwrap();
        let dm = distance_matrix(&pc);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 0.0 } else { 1.0 };
                assert!((dm.get(i, j) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn distance_matrix_invariants_random() {
        let spec = ShapeSpec {
            kind: ShapeKind::Sphere { radius: 1.0 },
            n: 10,
            noise: 0.2,
            seed: 3,
        };
        let pc = generate_shape(&spec).unwrap();
        let dm = distance_matrix(&pc);
        for i in 0..dm.n {
            assert_eq!(dm.get(i, i), 0.0);
            for j in 0..dm.n {
                assert_eq!(dm.get(i, j), dm.get(j, i));
                for k in 0..dm.n {
                    assert!(dm.get(i, j) <= dm.get(i, k) + dm.get(k, j) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn single_point_matrix() {
        let pc = PointCloud::new(vec![vec![1.0, 2.0]], "test").unwrap();
        let dm = distance_matrix(&pc);
        assert_eq!(dm.n, 1);
        assert_eq!(dm.get(0, 0), 0.0);
    }
}
