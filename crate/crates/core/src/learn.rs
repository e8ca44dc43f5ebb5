//! A small classification harness: binary kernel SVM trained by
//! sequential minimal optimization with maximal-violating-pair selection,
//! one-vs-rest multiclass, stratified cross-validated grid search, and
//! the three-class evaluation report (per-class accuracies, the two error
//! types, and overall accuracy).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::GramMatrix;
use crate::vectorize::FeatureMatrix;

/// Kernel used by the SVM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SvmKernel {
    Linear,
    Rbf { gamma: f64 },
    /// Kernel values come from a caller-provided Gram matrix.
    Precomputed,
}

/// SVM hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvmConfig {
    pub kernel: SvmKernel,
    pub c: f64,
    /// KKT violation tolerance for termination.
    pub tolerance: f64,
    pub max_iter: usize,
}

impl SvmConfig {
    pub fn new(kernel: SvmKernel, c: f64) -> Self {
        SvmConfig {
            kernel,
            c,
            tolerance: 1e-3,
            max_iter: 200_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) {
            return Err(Error::InvalidInput("C must be > 0".into()));
        }
        if let SvmKernel::Rbf { gamma } = self.kernel {
            if !(gamma > 0.0) {
                return Err(Error::InvalidInput("gamma must be > 0".into()));
            }
        }
        Ok(())
    }
}

/// Training data: dense feature rows or a precomputed training Gram.
pub enum SvmInput<'a> {
    Features(&'a FeatureMatrix),
    Gram(&'a GramMatrix),
}

impl SvmInput<'_> {
    fn len(&self) -> usize {
        match self {
            SvmInput::Features(x) => x.n_samples(),
            SvmInput::Gram(g) => g.n,
        }
    }

    fn kernel_matrix(&self, cfg: &SvmConfig) -> Result<Vec<f64>> {
        let n = self.len();
        match (self, cfg.kernel) {
            (SvmInput::Features(x), SvmKernel::Linear) => {
                let mut k = vec![0.0; n * n];
                for i in 0..n {
                    for j in i..n {
                        let v = dot(x.row(i), x.row(j));
                        k[i * n + j] = v;
                        k[j * n + i] = v;
                    }
                }
                Ok(k)
            }
            (SvmInput::Features(x), SvmKernel::Rbf { gamma }) => {
                let mut k = vec![0.0; n * n];
                for i in 0..n {
                    for j in i..n {
                        let v = (-gamma * sq_dist(x.row(i), x.row(j))).exp();
                        k[i * n + j] = v;
                        k[j * n + i] = v;
                    }
                }
                Ok(k)
            }
            (SvmInput::Gram(g), SvmKernel::Precomputed) => {
                Ok((0..n * n).map(|idx| g.row(idx / n)[idx % n]).collect())
            }
            (SvmInput::Gram(_), _) => Err(Error::InvalidInput(
                "gram input requires the precomputed kernel".into(),
            )),
            (SvmInput::Features(_), SvmKernel::Precomputed) => Err(Error::InvalidInput(
                "precomputed kernel requires gram input".into(),
            )),
        }
    }
}

/// A trained binary SVM.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvmModel {
    pub config: SvmConfig,
    /// Indices of the support vectors within the training set.
    pub support_indices: Vec<usize>,
    /// `alpha_i * y_i` per support vector.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    /// The labels encoded as -1/+1.
    pub class_labels: (i32, i32),
    /// Support-vector feature rows, kept for dense-kernel prediction;
    /// empty in precomputed mode.
    pub support_rows: Vec<Vec<f64>>,
    /// Dual objective value per SMO iteration (monotone non-decreasing).
    #[serde(skip)]
    pub objective_trace: Vec<f64>,
}

impl SvmModel {
    /// Decision value for a dense feature row (linear / RBF kernels).
    pub fn decision(&self, x: &[f64]) -> f64 {
        let mut acc = self.bias;
        for (row, coef) in self.support_rows.iter().zip(&self.dual_coefs) {
            let k = match self.config.kernel {
                SvmKernel::Linear => dot(row, x),
                SvmKernel::Rbf { gamma } => (-gamma * sq_dist(row, x)).exp(),
                SvmKernel::Precomputed => unreachable!("dense decision on precomputed model"),
            };
            acc += coef * k;
        }
        acc
    }

    /// Decision value from precomputed kernel evaluations against the
    /// training set (`krow[i]` = K(test, train_i)).
    pub fn decision_krow(&self, krow: &[f64]) -> f64 {
        self.bias
            + self
                .support_indices
                .iter()
                .zip(&self.dual_coefs)
                .map(|(&i, c)| c * krow[i])
                .sum::<f64>()
    }

    pub fn predict(&self, x: &[f64]) -> i32 {
        if self.decision(x) >= 0.0 {
            self.class_labels.1
        } else {
            self.class_labels.0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Model(format!("bad model JSON: {e}")))
    }
}

/// Trains a binary SVM on labels in {-1, +1} by SMO: the working pair is
/// always the maximal KKT violator, and optimization stops when no pair
/// violates the KKT conditions beyond the tolerance.
pub fn svm_train(input: &SvmInput, y: &[f64], cfg: &SvmConfig) -> Result<SvmModel> {
    cfg.validate()?;
    let n = input.len();
    if y.len() != n {
        return Err(Error::InvalidInput(format!(
            "{n} samples but {} labels",
            y.len()
        )));
    }
    if y.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidInput("labels must be -1 or +1".into()));
    }
    if !y.iter().any(|&v| v == 1.0) || !y.iter().any(|&v| v == -1.0) {
        return Err(Error::InvalidInput("training needs both classes".into()));
    }
    let kernel = input.kernel_matrix(cfg)?;
    let (alphas, bias, objective_trace) = smo(&kernel, y, n, cfg);

    let mut support_indices = Vec::new();
    let mut dual_coefs = Vec::new();
    let mut support_rows = Vec::new();
    for i in 0..n {
        if alphas[i] > 0.0 {
            support_indices.push(i);
            dual_coefs.push(alphas[i] * y[i]);
            if let SvmInput::Features(x) = input {
                support_rows.push(x.row(i).to_vec());
            }
        }
    }
    Ok(SvmModel {
        config: cfg.clone(),
        support_indices,
        dual_coefs,
        bias,
        class_labels: (-1, 1),
        support_rows,
        objective_trace,
    })
}

/// The SMO loop over a dense kernel matrix. Returns alphas, bias, and
/// the per-iteration dual objective.
fn smo(kernel: &[f64], y: &[f64], n: usize, cfg: &SvmConfig) -> (Vec<f64>, f64, Vec<f64>) {
    let c = cfg.c;
    let mut alpha = vec![0.0; n];
    // f_i = sum_j alpha_j y_j K_ij (decision sans bias).
    let mut f = vec![0.0; n];
    let mut trace = Vec::new();

    let mut m_final = 0.0;
    let mut m_low_final = 0.0;
    for _iter in 0..cfg.max_iter {
        // Maximal violating pair: i maximizes -E over I_up, j minimizes
        // over I_low.
        let mut i_best: Option<(usize, f64)> = None;
        let mut j_best: Option<(usize, f64)> = None;
        for t in 0..n {
            let in_up = (y[t] > 0.0 && alpha[t] < c) || (y[t] < 0.0 && alpha[t] > 0.0);
            let in_low = (y[t] > 0.0 && alpha[t] > 0.0) || (y[t] < 0.0 && alpha[t] < c);
            let neg_e = y[t] - f[t];
            if in_up && i_best.map_or(true, |(_, v)| neg_e > v) {
                i_best = Some((t, neg_e));
            }
            if in_low && j_best.map_or(true, |(_, v)| neg_e < v) {
                j_best = Some((t, neg_e));
            }
        }
        let (Some((i, m_up)), Some((j, m_low))) = (i_best, j_best) else {
            break;
        };
        m_final = m_up;
        m_low_final = m_low;
        if m_up - m_low <= cfg.tolerance {
            break;
        }

        // Two-variable subproblem on (i, j).
        let e_i = f[i] - y[i];
        let e_j = f[j] - y[j];
        let eta = kernel[i * n + i] + kernel[j * n + j] - 2.0 * kernel[i * n + j];
        let eta = if eta > 1e-12 { eta } else { 1e-12 };
        let (lo, hi) = if y[i] != y[j] {
            ((alpha[j] - alpha[i]).max(0.0), (c + alpha[j] - alpha[i]).min(c))
        } else {
            ((alpha[i] + alpha[j] - c).max(0.0), (alpha[i] + alpha[j]).min(c))
        };
        let mut alpha_j_new = alpha[j] + y[j] * (e_i - e_j) / eta;
        alpha_j_new = alpha_j_new.clamp(lo, hi);
        let alpha_i_new = alpha[i] + y[i] * y[j] * (alpha[j] - alpha_j_new);
        let d_i = alpha_i_new - alpha[i];
        let d_j = alpha_j_new - alpha[j];
        if d_j.abs() < 1e-15 && d_i.abs() < 1e-15 {
            break; // numerically stuck at the box boundary
        }
        alpha[i] = alpha_i_new;
        alpha[j] = alpha_j_new;
        for t in 0..n {
            f[t] += d_i * y[i] * kernel[t * n + i] + d_j * y[j] * kernel[t * n + j];
        }
        let objective: f64 = alpha.iter().sum::<f64>()
            - 0.5
                * (0..n)
                    .map(|t| alpha[t] * y[t] * f[t])
                    .sum::<f64>();
        trace.push(objective);
    }
    // Bias from the final violation bounds: both collapse to -E at the
    // free support vectors.
    let bias = (m_final + m_low_final) / 2.0;
    (alpha, bias, trace)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// One-vs-rest multiclass model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OvrModel {
    pub classes: Vec<usize>,
    pub models: Vec<SvmModel>,
}

/// Trains one binary model per class (that class against the rest).
pub fn ovr_train(input: &SvmInput, y: &[usize], cfg: &SvmConfig) -> Result<OvrModel> {
    let mut classes: Vec<usize> = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::InvalidInput("need at least two classes".into()));
    }
    let models = classes
        .iter()
        .map(|&cls| {
            let labels: Vec<f64> = y.iter().map(|&v| if v == cls { 1.0 } else { -1.0 }).collect();
            svm_train(input, &labels, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OvrModel { classes, models })
}

impl OvrModel {
    /// Predicts by the largest decision value; ties break to the
    /// smallest class index.
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut best = (self.classes[0], f64::NEG_INFINITY);
        for (cls, model) in self.classes.iter().zip(&self.models) {
            let d = model.decision(x);
            if d > best.1 {
                best = (*cls, d);
            }
        }
        best.0
    }

    /// Prediction from precomputed kernel rows against the training set.
    pub fn predict_krow(&self, krow: &[f64]) -> usize {
        let mut best = (self.classes[0], f64::NEG_INFINITY);
        for (cls, model) in self.classes.iter().zip(&self.models) {
            let d = model.decision_krow(krow);
            if d > best.1 {
                best = (*cls, d);
            }
        }
        best.0
    }
}

/// The default C grid: powers of two from 2^-14 to 2^14.
pub fn default_c_grid() -> Vec<f64> {
    (-14..=14).map(|e| 2f64.powi(e)).collect()
}

/// The default gamma grid: powers of two from 2^-6 to 2^3.
pub fn default_gamma_grid() -> Vec<f64> {
    (-6..=3).map(|e| 2f64.powi(e)).collect()
}

/// Outcome of a cross-validated grid search.
#[derive(Debug, Clone)]
pub struct GridSearchResult {
    pub c: f64,
    pub gamma: Option<f64>,
    pub cv_accuracy: f64,
}

/// Stratified fold assignment: per class, samples are shuffled
/// (seeded) and dealt round-robin.
fn stratified_folds(y: &[usize], folds: usize, seed: u64) -> Result<Vec<usize>> {
    let mut by_class: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, &cls) in y.iter().enumerate() {
        by_class.entry(cls).or_default().push(i);
    }
    for (cls, members) in &by_class {
        if members.len() < folds {
            return Err(Error::InvalidInput(format!(
                "class {cls} has {} samples, fewer than {folds} folds",
                members.len()
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; y.len()];
    for members in by_class.values() {
        let mut shuffled = members.clone();
        shuffled.shuffle(&mut rng);
        for (pos, &idx) in shuffled.iter().enumerate() {
            assignment[idx] = pos % folds;
        }
    }
    Ok(assignment)
}

/// Kind of kernel grid searched over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SearchKernel {
    Linear,
    Rbf,
    Precomputed,
}

/// Cross-validated grid search. For RBF the full kernel matrix is built
/// once per gamma and shared across folds and C values; fold models then
/// train on its sub-blocks through the precomputed path. Ties in CV
/// accuracy resolve to the smallest C, then the smallest gamma.
pub fn grid_search_cv(
    input: &SvmInput,
    y: &[usize],
    kernel: SearchKernel,
    c_grid: &[f64],
    gamma_grid: &[f64],
    folds: usize,
    seed: u64,
) -> Result<GridSearchResult> {
    if folds < 2 {
        return Err(Error::InvalidInput("need at least 2 folds".into()));
    }
    if c_grid.is_empty() {
        return Err(Error::InvalidInput("empty C grid".into()));
    }
    let n = input.len();
    if y.len() != n {
        return Err(Error::InvalidInput("label count mismatch".into()));
    }
    let fold_of = stratified_folds(y, folds, seed)?;

    let gammas: Vec<Option<f64>> = match kernel {
        SearchKernel::Rbf => {
            if gamma_grid.is_empty() {
                return Err(Error::InvalidInput("empty gamma grid".into()));
            }
            gamma_grid.iter().map(|&g| Some(g)).collect()
        }
        _ => vec![None],
    };

    let mut best: Option<GridSearchResult> = None;
    for &gamma in &gammas {
        // Full kernel matrix over all samples for this gamma.
        let full = match (input, kernel) {
            (SvmInput::Features(x), SearchKernel::Rbf) => {
                let gamma = gamma.unwrap();
                let mut k = vec![0.0; n * n];
                for i in 0..n {
                    for j in i..n {
                        let v = (-gamma * sq_dist(x.row(i), x.row(j))).exp();
                        k[i * n + j] = v;
                        k[j * n + i] = v;
                    }
                }
                k
            }
            (SvmInput::Features(x), SearchKernel::Linear) => {
                let mut k = vec![0.0; n * n];
                for i in 0..n {
                    for j in i..n {
                        let v = dot(x.row(i), x.row(j));
                        k[i * n + j] = v;
                        k[j * n + i] = v;
                    }
                }
                k
            }
            (SvmInput::Gram(g), SearchKernel::Precomputed) => {
                (0..n * n).map(|idx| g.row(idx / n)[idx % n]).collect()
            }
            _ => {
                return Err(Error::InvalidInput(
                    "search kernel does not match the input kind".into(),
                ))
            }
        };

        let accuracies: Vec<(f64, f64)> = c_grid
            .par_iter()
            .map(|&c| {
                let mut correct = 0usize;
                for fold in 0..folds {
                    let train_idx: Vec<usize> =
                        (0..n).filter(|&i| fold_of[i] != fold).collect();
                    let val_idx: Vec<usize> = (0..n).filter(|&i| fold_of[i] == fold).collect();
                    let sub = subgram(&full, n, &train_idx);
                    let y_train: Vec<usize> = train_idx.iter().map(|&i| y[i]).collect();
                    let cfg = SvmConfig::new(SvmKernel::Precomputed, c);
                    let Ok(model) = ovr_train(&SvmInput::Gram(&sub), &y_train, &cfg) else {
                        continue;
                    };
                    for &v in &val_idx {
                        let krow: Vec<f64> =
                            train_idx.iter().map(|&t| full[v * n + t]).collect();
                        if model.predict_krow(&krow) == y[v] {
                            correct += 1;
                        }
                    }
                }
                (c, correct as f64 / n as f64)
            })
            .collect();

        for (c, acc) in accuracies {
            let better = match &best {
                None => true,
                Some(b) => {
                    acc > b.cv_accuracy + 1e-12
                        || ((acc - b.cv_accuracy).abs() <= 1e-12
                            && (c < b.c || (c == b.c && gamma < b.gamma)))
                }
            };
            if better {
                best = Some(GridSearchResult {
                    c,
                    gamma,
                    cv_accuracy: acc,
                });
            }
        }
    }
    Ok(best.expect("grids are non-empty"))
}

/// Extracts the training-index block of a full kernel matrix as a
/// GramMatrix for the precomputed path.
fn subgram(full: &[f64], n: usize, indices: &[usize]) -> GramMatrix {
    let m = indices.len();
    let mut values = vec![0.0; m * m];
    for (a, &i) in indices.iter().enumerate() {
        for (b, &j) in indices.iter().enumerate() {
            values[a * m + b] = full[i * n + j];
        }
    }
    GramMatrix::from_values((0..m).map(|i| format!("s{i}")).collect(), values)
}

/// The classification report of the three-class protocol.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub classes: Vec<usize>,
    /// Row-major confusion matrix, rows = truth, columns = prediction.
    pub confusion: Vec<usize>,
    pub per_class_accuracy: Vec<f64>,
    /// Misclassifications involving the designated mixed class.
    pub type1_errors: usize,
    /// Misclassifications among the remaining (pure) classes.
    pub type2_errors: usize,
    pub n: usize,
    pub overall_accuracy: f64,
}

/// Cross-tabulates predictions against truth. `mixed_class` designates
/// the class whose confusions count as Type-I errors; all other
/// confusions are Type-II.
pub fn evaluate(pred: &[usize], truth: &[usize], mixed_class: usize) -> Result<EvalReport> {
    if pred.len() != truth.len() || truth.is_empty() {
        return Err(Error::InvalidInput("prediction/truth length mismatch".into()));
    }
    let mut classes: Vec<usize> = truth.to_vec();
    classes.extend_from_slice(pred);
    classes.sort_unstable();
    classes.dedup();
    let k = classes.len();
    let slot = |cls: usize| classes.iter().position(|&c| c == cls).unwrap();
    let mut confusion = vec![0usize; k * k];
    let mut type1 = 0;
    let mut type2 = 0;
    for (&p, &t) in pred.iter().zip(truth) {
        confusion[slot(t) * k + slot(p)] += 1;
        if p != t {
            if p == mixed_class || t == mixed_class {
                type1 += 1;
            } else {
                type2 += 1;
            }
        }
    }
    let per_class_accuracy = (0..k)
        .map(|r| {
            let total: usize = (0..k).map(|c| confusion[r * k + c]).sum();
            if total == 0 {
                0.0
            } else {
                confusion[r * k + r] as f64 / total as f64
            }
        })
        .collect();
    let n = truth.len();
    let correct: usize = (0..k).map(|r| confusion[r * k + r]).sum();
    Ok(EvalReport {
        classes,
        confusion,
        per_class_accuracy,
        type1_errors: type1,
        type2_errors: type2,
        n,
        overall_accuracy: correct as f64 / n as f64,
    })
}

impl EvalReport {
    /// The six-row results table: one accuracy row per class, the two
    /// error-rate rows, and overall accuracy.
    pub fn table(&self, class_names: &[String]) -> String {
        let mut out = String::new();
        let width = class_names
            .iter()
            .map(|s| s.len())
            .max()
            .unwrap_or(8)
            .max("Type-II Error".len());
        for (i, name) in class_names.iter().enumerate() {
            out.push_str(&format!(
                "{name:<width$}  {:.1}%\n",
                100.0 * self.per_class_accuracy[i]
            ));
        }
        out.push_str(&format!(
            "{:<width$}  {}/{}\n",
            "Type-I Error", self.type1_errors, self.n
        ));
        out.push_str(&format!(
            "{:<width$}  {}/{}\n",
            "Type-II Error", self.type2_errors, self.n
        ));
        out.push_str(&format!(
            "{:<width$}  {:.1}%\n",
            "Overall",
            100.0 * self.overall_accuracy
        ));
        out
    }
}
