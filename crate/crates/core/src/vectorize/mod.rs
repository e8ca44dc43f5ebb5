//! Fixed-length feature vectors from persistence diagrams.
//!
//! Every vectorizer here is shape-stable: with fixed parameters it
//! returns the same length for every diagram, including empty ones.
//! Infinite deaths are capped at the diagram's own maximum filtration
//! value before anything is computed.

mod codebook;
mod gmm;
mod preprocess;
mod signature;

pub use codebook::{fit_codebook, pbow, pvlad, Codebook};
pub use gmm::{fit_gmm, pfv, GmmModel};
pub use preprocess::{pca, PcaModel, Preprocessor};
pub use signature::{signature_layer, SignatureUnit};

use crate::error::{Error, Result};
use crate::functions::{self, Grid1D, ImageParams};
use crate::numfmt;
use crate::persistence::{Bar, PersistenceDiagramSet};

/// A dense samples-by-features matrix with column names and row ids.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub sample_ids: Vec<String>,
    pub col_names: Vec<String>,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(sample_ids: Vec<String>, col_names: Vec<String>, data: Vec<f64>) -> Result<Self> {
        if sample_ids.len() * col_names.len() != data.len() {
            return Err(Error::InvalidInput(format!(
                "{} samples x {} columns but {} values",
                sample_ids.len(),
                col_names.len(),
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite feature value".into()));
        }
        Ok(FeatureMatrix {
            sample_ids,
            col_names,
            data,
        })
    }

    /// Stacks per-sample rows; all rows must share the length of
    /// `col_names`.
    pub fn from_rows(
        sample_ids: Vec<String>,
        col_names: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let p = col_names.len();
        let mut data = Vec::with_capacity(rows.len() * p);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} values, expected {p}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        FeatureMatrix::new(sample_ids, col_names, data)
    }

    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn n_features(&self) -> usize {
        self.col_names.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n_features() + col]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.n_features();
        &self.data[i * p..(i + 1) * p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n_features().max(1))
    }

    /// Feature CSV: header `id,<column names>`, one sample per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,");
        out.push_str(&self.col_names.join(","));
        out.push('\n');
        for (i, id) in self.sample_ids.iter().enumerate() {
            out.push_str(id);
            for j in 0..self.n_features() {
                out.push(',');
                out.push_str(&numfmt::sig_digits(self.get(i, j), 9));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, l)) if l.trim().is_empty() => continue,
                Some((_, l)) => break l,
                None => return Err(Error::InvalidInput("empty feature CSV".into())),
            }
        };
        let mut cols: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        if cols.is_empty() || cols[0] != "id" {
            return Err(Error::InvalidInput("feature CSV must start with an id column".into()));
        }
        cols.remove(0);
        let p = cols.len();
        let mut ids = Vec::new();
        let mut data = Vec::new();
        for (idx, raw) in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let id = fields.next().unwrap_or("").to_string();
            let values: Vec<&str> = fields.collect();
            if values.len() != p {
                return Err(Error::RaggedRow {
                    line: idx + 1,
                    expected: p + 1,
                    found: values.len() + 1,
                });
            }
            for tok in values {
                let v = numfmt::parse_float(tok).ok_or_else(|| Error::NonNumeric {
                    line: idx + 1,
                    token: tok.to_string(),
                })?;
                data.push(v);
            }
            ids.push(id);
        }
        FeatureMatrix::new(ids, cols, data)
    }
}

/// Caps infinite deaths at `cap` and returns `(birth, death)` pairs.
pub(crate) fn capped_pairs(bars: &[Bar], cap: f64) -> Vec<(f64, f64)> {
    bars.iter()
        .map(|b| (b.birth, if b.death.is_finite() { b.death } else { cap }))
        .collect()
}

/// Rotated-diagram points `(birth, persistence)` with infinite deaths
/// capped at `cap`.
pub(crate) fn rotated_points(bars: &[Bar], cap: f64) -> Vec<(f64, f64)> {
    capped_pairs(bars, cap)
        .into_iter()
        .map(|(a, b)| (a, b - a))
        .collect()
}

/// The number of statistics in [`barcode_statistics`].
pub const BARCODE_STATISTICS_LEN: usize = 13;
/// Birth-time window of the 13th statistic (a count of dimension-1 bars),
/// sized for alpha-helix backbone loops in length units of the data.
pub const DIM1_BT_WINDOW: (f64, f64) = (4.5, 5.5);

/// The 13 barcode statistics, in this frozen slot order:
///
/// | slot | statistic |
/// |------|-----------|
/// | 0-2  | longest / 2nd / 3rd longest dim-0 persistence |
/// | 3-5  | longest / 2nd / 3rd longest dim-1 persistence |
/// | 6-7  | longest / 2nd longest dim-2 persistence |
/// | 8-9  | birth / death of the longest dim-1 bar |
/// | 10-11| birth / death of the longest dim-2 bar |
/// | 12   | count of dim-1 bars born in [4.5, 5.5] |
///
/// Missing entries are zero. Infinite deaths are capped at the diagram's
/// maximum filtration value.
pub fn barcode_statistics(d: &PersistenceDiagramSet) -> Vec<f64> {
    let cap = d.max_value();
    let sorted_by_length = |k: usize| -> Vec<(f64, f64)> {
        let mut pairs = capped_pairs(d.bars(k), cap);
        pairs.sort_by(|x, y| (y.1 - y.0).partial_cmp(&(x.1 - x.0)).unwrap());
        pairs
    };
    let d0 = sorted_by_length(0);
    let d1 = sorted_by_length(1);
    let d2 = sorted_by_length(2);
    let length = |v: &[(f64, f64)], i: usize| v.get(i).map(|(a, b)| b - a).unwrap_or(0.0);
    let birth = |v: &[(f64, f64)]| v.first().map(|(a, _)| *a).unwrap_or(0.0);
    let death = |v: &[(f64, f64)]| v.first().map(|(_, b)| *b).unwrap_or(0.0);
    let window_count = d
        .bars(1)
        .iter()
        .filter(|b| b.birth >= DIM1_BT_WINDOW.0 && b.birth <= DIM1_BT_WINDOW.1)
        .count() as f64;
    vec![
        length(&d0, 0),
        length(&d0, 1),
        length(&d0, 2),
        length(&d1, 0),
        length(&d1, 1),
        length(&d1, 2),
        length(&d2, 0),
        length(&d2, 1),
        birth(&d1),
        death(&d1),
        birth(&d2),
        death(&d2),
        window_count,
    ]
}

pub fn barcode_statistics_names() -> Vec<String> {
    [
        "pl0_1st", "pl0_2nd", "pl0_3rd", "pl1_1st", "pl1_2nd", "pl1_3rd", "pl2_1st", "pl2_2nd",
        "bt1_longest", "dt1_longest", "bt2_longest", "dt2_longest", "n1_bt_4p5_5p5",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// The four averaged algebraic coordinates of the dimension-`k` bars:
/// `sum a(b-a)/N`, `sum (max_b - b)(b-a)/N`, `sum a^2 (b-a)^4 / N`,
/// `sum (max_b - b)^2 (b-a)^4 / N`. All four are averaged by the bar
/// count; only finite bars participate, and an empty selection gives the
/// zero vector.
pub fn algebraic_coordinates(bars: &[Bar]) -> Vec<f64> {
    let finite: Vec<(f64, f64)> = bars
        .iter()
        .filter(|b| b.death.is_finite())
        .map(|b| (b.birth, b.death))
        .collect();
    if finite.is_empty() {
        return vec![0.0; 4];
    }
    let n = finite.len() as f64;
    let max_death = finite.iter().map(|(_, b)| *b).fold(f64::NEG_INFINITY, f64::max);
    let mut c = [0.0f64; 4];
    for &(a, b) in &finite {
        let len = b - a;
        let slack = max_death - b;
        c[0] += a * len;
        c[1] += slack * len;
        c[2] += a * a * len.powi(4);
        c[3] += slack * slack * len.powi(4);
    }
    c.iter().map(|v| v / n).collect()
}

/// Max-plus tropical coordinates: the largest sum of `m` distinct
/// persistences for `m = 1..4`, then the total persistence. Fewer bars
/// than the arity contribute what they have (missing terms are zero).
/// Infinite deaths are capped at `cap`.
pub fn tropical_coordinates(bars: &[Bar], cap: f64) -> Vec<f64> {
    let mut lengths: Vec<f64> = capped_pairs(bars, cap)
        .into_iter()
        .map(|(a, b)| b - a)
        .collect();
    lengths.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let top = |m: usize| -> f64 { lengths.iter().take(m).sum() };
    vec![top(1), top(2), top(3), top(4), lengths.iter().sum()]
}

/// One block family of the binning vectorizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinKind {
    /// Histogram of birth times.
    BtHist,
    /// Histogram of (capped) death times.
    DtHist,
    /// Histogram of (capped) persistences.
    PlHist,
    /// Betti curve sampled at the bin grid points.
    BettiSamples,
    /// 2D grid counts of (birth, capped death) pairs.
    PdGrid,
    /// Landscape levels sampled at the bin grid points.
    LandscapeSamples,
    /// Persistence image pixels.
    ImagePixels,
}

impl BinKind {
    fn tag(&self) -> &'static str {
        match self {
            BinKind::BtHist => "bt",
            BinKind::DtHist => "dt",
            BinKind::PlHist => "pl",
            BinKind::BettiSamples => "betti",
            BinKind::PdGrid => "pdgrid",
            BinKind::LandscapeSamples => "land",
            BinKind::ImagePixels => "img",
        }
    }
}

/// Configuration of [`binned_features`]: the filtration domain `[0, L]`
/// cut into `ceil(L / bin_width)` equal bins, a set of block kinds, and
/// the homology dimensions to include.
#[derive(Debug, Clone)]
pub struct BinningSpec {
    pub max_value: f64,
    pub bin_width: f64,
    pub kinds: Vec<BinKind>,
    pub dims: Vec<usize>,
    /// Level count for [`BinKind::LandscapeSamples`].
    pub landscape_levels: usize,
    /// Required when [`BinKind::ImagePixels`] is requested.
    pub image: Option<ImageParams>,
}

impl BinningSpec {
    /// The BT/DT/PL layout over dimensions 0..2: `9 N` features at `N`
    /// bins (three histograms, three dimensions), the standard binned
    /// feature set for distance filtrations.
    pub fn histograms(max_value: f64, bin_width: f64) -> Self {
        BinningSpec {
            max_value,
            bin_width,
            kinds: vec![BinKind::BtHist, BinKind::DtHist, BinKind::PlHist],
            dims: vec![0, 1, 2],
            landscape_levels: 3,
            image: None,
        }
    }

    pub fn n_bins(&self) -> usize {
        (self.max_value / self.bin_width).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.max_value > 0.0) || !(self.bin_width > 0.0) {
            return Err(Error::InvalidInput("binning needs positive L and width".into()));
        }
        if self.dims.is_empty() || self.kinds.is_empty() {
            return Err(Error::InvalidInput("binning needs dims and kinds".into()));
        }
        if self.kinds.contains(&BinKind::ImagePixels) && self.image.is_none() {
            return Err(Error::InvalidInput(
                "image binning requested without image parameters".into(),
            ));
        }
        if self.kinds.contains(&BinKind::LandscapeSamples) && self.landscape_levels == 0 {
            return Err(Error::InvalidInput("landscape binning needs levels >= 1".into()));
        }
        Ok(())
    }

    fn block_len(&self, kind: BinKind) -> usize {
        let n = self.n_bins();
        match kind {
            BinKind::BtHist | BinKind::DtHist | BinKind::PlHist => n,
            BinKind::BettiSamples => n + 1,
            BinKind::PdGrid => n * n,
            BinKind::LandscapeSamples => self.landscape_levels * (n + 1),
            BinKind::ImagePixels => {
                let (nx, ny) = self.image.as_ref().map(|p| p.resolution).unwrap_or((0, 0));
                nx * ny
            }
        }
    }

    /// Total feature count; fixed across diagrams.
    pub fn feature_len(&self) -> usize {
        self.dims.len() * self.kinds.iter().map(|&k| self.block_len(k)).sum::<usize>()
    }

    /// Column labels in emission order (dimension ascending, kinds in
    /// declaration order).
    pub fn column_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.feature_len());
        let n = self.n_bins();
        for &dim in &self.dims {
            for &kind in &self.kinds {
                let tag = kind.tag();
                match kind {
                    BinKind::BtHist | BinKind::DtHist | BinKind::PlHist => {
                        names.extend((0..n).map(|i| format!("d{dim}_{tag}_{i}")));
                    }
                    BinKind::BettiSamples => {
                        names.extend((0..=n).map(|i| format!("d{dim}_{tag}_{i}")));
                    }
                    BinKind::PdGrid => {
                        names.extend(
                            (0..n).flat_map(|i| (0..n).map(move |j| format!("d{dim}_{tag}_{i}_{j}"))),
                        );
                    }
                    BinKind::LandscapeSamples => {
                        for level in 1..=self.landscape_levels {
                            names.extend((0..=n).map(|i| format!("d{dim}_{tag}{level}_{i}")));
                        }
                    }
                    BinKind::ImagePixels => {
                        let (nx, ny) = self.image.as_ref().unwrap().resolution;
                        names.extend(
                            (0..ny).flat_map(|i| (0..nx).map(move |j| format!("d{dim}_{tag}_{i}_{j}"))),
                        );
                    }
                }
            }
        }
        names
    }
}

/// Bin index of an event on `[0, L]`: half-open bins `[x_i, x_{i+1})`
/// with a closed final bin; out-of-range events clamp to the end bins so
/// histogram totals stay equal to the bar count.
fn bin_index(x: f64, width: f64, n: usize) -> usize {
    if x < 0.0 {
        return 0;
    }
    ((x / width) as usize).min(n - 1)
}

/// The binning vectorizer. Emits, per requested dimension and kind (in
/// declaration order), histogram counts, Betti samples, diagram-grid
/// counts, landscape samples, or image pixels, concatenated into one
/// fixed-length vector.
pub fn binned_features(d: &PersistenceDiagramSet, spec: &BinningSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = spec.n_bins();
    let width = spec.bin_width;
    let cap = spec.max_value;
    let grid = Grid1D::new(0.0, spec.max_value, n + 1)?;
    let mut out = Vec::with_capacity(spec.feature_len());
    for &dim in &spec.dims {
        let bars = d.bars(dim);
        let pairs = capped_pairs(bars, cap);
        for &kind in &spec.kinds {
            match kind {
                BinKind::BtHist => {
                    let mut hist = vec![0.0; n];
                    for (a, _) in &pairs {
                        hist[bin_index(*a, width, n)] += 1.0;
                    }
                    out.extend(hist);
                }
                BinKind::DtHist => {
                    let mut hist = vec![0.0; n];
                    for (_, b) in &pairs {
                        hist[bin_index(*b, width, n)] += 1.0;
                    }
                    out.extend(hist);
                }
                BinKind::PlHist => {
                    let mut hist = vec![0.0; n];
                    for (a, b) in &pairs {
                        hist[bin_index(b - a, width, n)] += 1.0;
                    }
                    out.extend(hist);
                }
                BinKind::BettiSamples => {
                    out.extend(functions::betti_curve(bars, &grid));
                }
                BinKind::PdGrid => {
                    let mut counts = vec![0.0; n * n];
                    for (a, b) in &pairs {
                        let i = bin_index(*a, width, n);
                        let j = bin_index(*b, width, n);
                        counts[i * n + j] += 1.0;
                    }
                    out.extend(counts);
                }
                BinKind::LandscapeSamples => {
                    for row in functions::landscape_stack(bars, spec.landscape_levels, &grid)? {
                        out.extend(row);
                    }
                }
                BinKind::ImagePixels => {
                    let params = spec.image.as_ref().unwrap();
                    out.extend(functions::persistence_image(bars, params)?);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bar(a: f64, b: f64) -> Bar {
        Bar {
            birth: a,
            death: b,
            birth_index: 0,
            death_index: None,
        }
    }

    fn diagram(bars_by_dim: Vec<Vec<Bar>>, max_value: f64) -> PersistenceDiagramSet {
        PersistenceDiagramSet::from_bars(bars_by_dim, max_value)
    }

    #[test]
    fn stats_empty_diagram_is_zero() {
        let d = diagram(vec![vec![], vec![], vec![]], 1.0);
        assert_eq!(barcode_statistics(&d), vec![0.0; BARCODE_STATISTICS_LEN]);
    }

    #[test]
    fn stats_golden_slots() {
        let sqrt3 = 3f64.sqrt();
        let d = diagram(
            vec![
                vec![bar(0.0, 1.0), bar(0.0, f64::INFINITY)],
                vec![bar(1.0, sqrt3)],
                vec![],
            ],
            2.0,
        );
        let s = barcode_statistics(&d);
        assert_eq!(s.len(), BARCODE_STATISTICS_LEN);
        // Infinite H0 bar capped at 2.0 is the longest dim-0 length.
        assert!((s[0] - 2.0).abs() < 1e-12);
        assert!((s[1] - 1.0).abs() < 1e-12);
        assert_eq!(s[2], 0.0);
        assert!((s[3] - (sqrt3 - 1.0)).abs() < 1e-12);
        assert_eq!(s[4], 0.0);
        assert!((s[8] - 1.0).abs() < 1e-12); // BT of longest dim-1
        assert!((s[9] - sqrt3).abs() < 1e-12); // DT of longest dim-1
        assert_eq!(s[10], 0.0);
        assert_eq!(s[11], 0.0);
        assert_eq!(s[12], 0.0);
    }

    #[test]
    fn stats_dim1_window_count() {
        let d = diagram(
            vec![vec![], vec![bar(4.6, 6.0), bar(5.5, 7.0), bar(4.4, 6.0)]],
            10.0,
        );
        let s = barcode_statistics(&d);
        assert_eq!(s[12], 2.0);
    }

    #[test]
    fn algebraic_examples() {
        // All births zero kills the first coordinate.
        let zeros = vec![bar(0.0, 1.0), bar(0.0, 2.0)];
        assert_eq!(algebraic_coordinates(&zeros)[0], 0.0);
        // A single bar has max_b == b, so slack terms vanish.
        let single = vec![bar(1.0, 2.0)];
        let c = algebraic_coordinates(&single);
        assert_eq!(c[1], 0.0);
        assert_eq!(c[3], 0.0);
        // Direct evaluation on {(0,1), (1,3)}.
        let two = vec![bar(0.0, 1.0), bar(1.0, 3.0)];
        let c = algebraic_coordinates(&two);
        assert!((c[0] - 1.0).abs() < 1e-12);
        // Empty input is the zero vector.
        assert_eq!(algebraic_coordinates(&[]), vec![0.0; 4]);
    }

    #[test]
    fn tropical_examples() {
        let d = vec![bar(0.0, 3.0), bar(1.0, 2.0)];
        assert_eq!(tropical_coordinates(&d, 10.0), vec![3.0, 4.0, 4.0, 4.0, 4.0]);
        let d = vec![bar(0.0, 4.0), bar(0.0, 3.0), bar(0.0, 2.0), bar(0.0, 1.0)];
        assert_eq!(
            tropical_coordinates(&d, 10.0),
            vec![4.0, 7.0, 9.0, 10.0, 10.0]
        );
        assert_eq!(tropical_coordinates(&[], 10.0), vec![0.0; 5]);
    }

    #[test]
    fn tropical_monotone_in_arity() {
        let d = vec![bar(0.0, 2.5), bar(1.0, 1.2), bar(0.0, 0.4)];
        let t = tropical_coordinates(&d, 5.0);
        for w in t.windows(2) {
            assert!(w[0] <= w[1] + 1e-12);
        }
        assert!(t[3] <= t[4] + 1e-12);
    }

    #[test]
    fn binned_pl_histogram_placement() {
        let sqrt3 = 3f64.sqrt();
        let d = diagram(vec![vec![], vec![bar(1.0, sqrt3)]], 2.0);
        let spec = BinningSpec {
            max_value: 2.0,
            bin_width: 0.5,
            kinds: vec![BinKind::PlHist],
            dims: vec![1],
            landscape_levels: 1,
            image: None,
        };
        let v = binned_features(&d, &spec).unwrap();
        // Persistence 0.732 lands in bin [0.5, 1.0).
        assert_eq!(v, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn nine_n_layout() {
        let spec = BinningSpec::histograms(20.0, 0.5);
        assert_eq!(spec.n_bins(), 40);
        assert_eq!(spec.feature_len(), 9 * 40);
        let d = diagram(vec![vec![bar(0.0, 1.0)], vec![], vec![]], 20.0);
        let v = binned_features(&d, &spec).unwrap();
        assert_eq!(v.len(), 360);
        assert_eq!(spec.column_names().len(), 360);
        // Empty diagram keeps the shape.
        let empty = diagram(vec![], 20.0);
        assert_eq!(binned_features(&empty, &spec).unwrap().len(), 360);
    }

    #[test]
    fn histograms_sum_to_bar_counts() {
        let d = diagram(
            vec![
                vec![bar(0.0, 0.4), bar(0.0, f64::INFINITY)],
                vec![bar(0.3, 1.9), bar(0.9, 1.0), bar(1.2, 2.4)],
            ],
            2.0,
        );
        let spec = BinningSpec {
            max_value: 2.0,
            bin_width: 0.25,
            kinds: vec![BinKind::BtHist, BinKind::DtHist, BinKind::PlHist],
            dims: vec![0, 1],
            landscape_levels: 1,
            image: None,
        };
        let v = binned_features(&d, &spec).unwrap();
        let n = spec.n_bins();
        for (block, &dim) in (0..).zip(&[0usize, 0, 0, 1, 1, 1]) {
            let total: f64 = v[block * n..(block + 1) * n].iter().sum();
            assert_eq!(total, d.bars(dim).len() as f64, "block {block}");
        }
    }

    #[test]
    fn bin_widths_scale_exactly() {
        for (width, bins) in [(0.5, 40), (0.25, 80), (0.1, 200)] {
            let spec = BinningSpec::histograms(20.0, width);
            assert_eq!(spec.n_bins(), bins);
            assert_eq!(spec.feature_len(), 9 * bins);
        }
    }

    #[test]
    fn feature_matrix_csv_round_trip() {
        let m = FeatureMatrix::from_rows(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into()],
            vec![vec![1.0, 2.5], vec![-3.0, 0.125]],
        )
        .unwrap();
        let back = FeatureMatrix::from_csv(&m.to_csv()).unwrap();
        assert_eq!(back.sample_ids, m.sample_ids);
        assert_eq!(back.col_names, m.col_names);
        for i in 0..2 {
            for j in 0..2 {
                assert!((back.get(i, j) - m.get(i, j)).abs() < 1e-9);
            }
        }
    }
}
