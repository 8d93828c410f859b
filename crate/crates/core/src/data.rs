//! Labeled datasets, CSV ingestion, feature scaling, splitting and the
//! linear-Gaussian toy model.

use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{vector, DenseMatrix};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    Real,
    /// Labels in `{-1, +1}`.
    Binary,
    None,
}

/// `m` data points with `n` features each and an optional label per point.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: DenseMatrix,
    labels: Vec<f64>,
    label_kind: LabelKind,
    feature_names: Vec<String>,
}

fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|j| format!("x{j}")).collect()
}

impl LabeledDataset {
    pub fn new(features: DenseMatrix, labels: Vec<f64>, label_kind: LabelKind) -> Result<Self> {
        let m = features.rows();
        if m == 0 {
            return Err(Error::Size("a dataset needs at least one data point".into()));
        }
        match label_kind {
            LabelKind::None if !labels.is_empty() => {
                return Err(Error::Shape("unlabeled dataset given labels".into()))
            }
            LabelKind::Real | LabelKind::Binary if labels.len() != m => {
                return Err(Error::Shape(format!(
                    "{} labels for {m} data points",
                    labels.len()
                )))
            }
            _ => {}
        }
        if !vector::all_finite(&labels) {
            return Err(Error::Numeric("labels must be finite".into()));
        }
        if label_kind == LabelKind::Binary {
            if let Some(bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
                return Err(Error::Domain(format!("binary label {bad} is not -1 or +1")));
            }
        }
        let n = features.cols();
        Ok(Self {
            features,
            labels,
            label_kind,
            feature_names: default_names(n),
        })
    }

    pub fn regression(features: DenseMatrix, labels: Vec<f64>) -> Result<Self> {
        Self::new(features, labels, LabelKind::Real)
    }

    pub fn binary(features: DenseMatrix, labels: Vec<f64>) -> Result<Self> {
        Self::new(features, labels, LabelKind::Binary)
    }

    pub fn unlabeled(features: DenseMatrix) -> Result<Self> {
        Self::new(features, Vec::new(), LabelKind::None)
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.dim() {
            return Err(Error::Shape(format!(
                "{} names for {} features",
                names.len(),
                self.dim()
            )));
        }
        self.feature_names = names;
        Ok(self)
    }

    /// Same labels, new feature matrix (for feature maps and projections).
    pub fn with_features(&self, features: DenseMatrix) -> Result<Self> {
        if features.rows() != self.len() {
            return Err(Error::Shape(format!(
                "{} feature rows for {} data points",
                features.rows(),
                self.len()
            )));
        }
        Self::new(features, self.labels.clone(), self.label_kind)
    }

    /// Prepends a constant-one feature so linear models get an intercept.
    pub fn prepend_constant(&self) -> Self {
        let (m, n) = self.features.shape();
        let mut data = Vec::with_capacity(m * (n + 1));
        for r in self.features.row_iter() {
            data.push(1.0);
            data.extend_from_slice(r);
        }
        let mut names = vec!["1".to_string()];
        names.extend(self.feature_names.iter().cloned());
        Self {
            features: DenseMatrix::new(m, n + 1, data).expect("finite by construction"),
            labels: self.labels.clone(),
            label_kind: self.label_kind,
            feature_names: names,
        }
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn label_kind(&self) -> LabelKind {
        self.label_kind
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Number of data points `m`.
    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of features `n`.
    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.features.row(i)
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn is_labeled(&self) -> bool {
        self.label_kind != LabelKind::None
    }

    pub(crate) fn require_labels(&self) -> Result<()> {
        if self.is_labeled() {
            Ok(())
        } else {
            Err(Error::DegenerateLabels("dataset has no labels".into()))
        }
    }

    pub(crate) fn require_binary(&self) -> Result<()> {
        if self.label_kind == LabelKind::Binary {
            Ok(())
        } else {
            Err(Error::Domain(
                "operation needs binary labels in {-1, +1}".into(),
            ))
        }
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Size("empty subset".into()));
        }
        let labels = if self.is_labeled() {
            indices.iter().map(|&i| self.labels[i]).collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            features: self.features.select_rows(indices),
            labels,
            label_kind: self.label_kind,
            feature_names: self.feature_names.clone(),
        })
    }
}

/// Reads a comma-separated file with a header row.
///
/// An empty `feature_cols` selects every column except `label_col`. Labels are
/// typed [`LabelKind::Binary`] when every value is `-1` or `+1`, otherwise
/// [`LabelKind::Real`]. Row numbers in parse errors count data rows from 1.
pub fn load_csv(
    path: impl AsRef<Path>,
    feature_cols: &[String],
    label_col: Option<&str>,
) -> Result<LabeledDataset> {
    let file = std::fs::File::open(path)?;
    read_csv(file, feature_cols, label_col)
}

pub fn read_csv<R: Read>(
    reader: R,
    feature_cols: &[String],
    label_col: Option<&str>,
) -> Result<LabeledDataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let position = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(name.to_string()))
    };

    let label_idx = label_col.map(position).transpose()?;
    let feature_idx: Vec<usize> = if feature_cols.is_empty() {
        (0..headers.len()).filter(|&j| Some(j) != label_idx).collect()
    } else {
        feature_cols.iter().map(|c| position(c)).collect::<Result<_>>()?
    };

    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut rows = 0;
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row = r + 1;
        let cell = |j: usize| -> Result<f64> {
            let raw = record.get(j).unwrap_or("").trim();
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    row,
                    column: headers[j].clone(),
                    value: raw.to_string(),
                })
        };
        for &j in &feature_idx {
            data.push(cell(j)?);
        }
        if let Some(j) = label_idx {
            labels.push(cell(j)?);
        }
        rows += 1;
    }

    let features = DenseMatrix::new(rows, feature_idx.len(), data)?;
    let kind = match label_idx {
        None => LabelKind::None,
        Some(_) if labels.iter().all(|&y| y == 1.0 || y == -1.0) => LabelKind::Binary,
        Some(_) => LabelKind::Real,
    };
    let names = feature_idx.iter().map(|&j| headers[j].clone()).collect();
    LabeledDataset::new(features, labels, kind)?.with_feature_names(names)
}

/// Writes the dataset in the same CSV dialect `read_csv` accepts; the label
/// column is named `label_name`.
pub fn write_csv<W: Write>(d: &LabeledDataset, writer: W, label_name: &str) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = d.feature_names().iter().map(String::as_str).collect();
    if d.is_labeled() {
        header.push(label_name);
    }
    wtr.write_record(&header)?;
    for i in 0..d.len() {
        let mut rec: Vec<String> = d.point(i).iter().map(|v| v.to_string()).collect();
        if d.is_labeled() {
            rec.push(d.label(i).to_string());
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Divides every value by the largest one.
pub fn min_max_scale(values: &[f64]) -> Result<Vec<f64>> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) || !max.is_finite() {
        return Err(Error::Domain(format!(
            "scaling needs a positive finite maximum, got {max}"
        )));
    }
    Ok(values.iter().map(|v| v / max).collect())
}

/// Per-feature shift and scale produced by [`normalize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub means: Vec<f64>,
    pub sigmas: Vec<f64>,
}

impl NormalizationParams {
    /// Applies `(x_j - mean_j) / sigma_j` to every point of `d`.
    pub fn apply(&self, d: &LabeledDataset) -> Result<LabeledDataset> {
        if d.dim() != self.means.len() {
            return Err(Error::Shape(format!(
                "normalization fitted on {} features, dataset has {}",
                self.means.len(),
                d.dim()
            )));
        }
        let mut x = d.features().clone();
        for i in 0..x.rows() {
            for (j, v) in x.row_mut(i).iter_mut().enumerate() {
                *v = (*v - self.means[j]) / self.sigmas[j];
            }
        }
        Ok(LabeledDataset {
            features: x,
            labels: d.labels.clone(),
            label_kind: d.label_kind,
            feature_names: d.feature_names.clone(),
        })
    }
}

/// Centers every feature and scales it to unit mean square.
///
/// `σ̂_j² = (1/m) Σ_i (x_j⁽ⁱ⁾ − x̄_j)²` is computed after centering and each
/// feature is divided by its own `σ̂_j`.
pub fn normalize(d: &LabeledDataset) -> Result<(LabeledDataset, NormalizationParams)> {
    let (m, n) = d.features().shape();
    if m < 2 {
        return Err(Error::Size("normalization needs at least two data points".into()));
    }
    let x = d.features();
    let mut means = vec![0.0; n];
    for r in x.row_iter() {
        vector::axpy(1.0, r, &mut means);
    }
    means.iter_mut().for_each(|v| *v /= m as f64);

    let mut sigmas = vec![0.0; n];
    for r in x.row_iter() {
        for j in 0..n {
            sigmas[j] += (r[j] - means[j]).powi(2);
        }
    }
    for j in 0..n {
        sigmas[j] = (sigmas[j] / m as f64).sqrt();
        let scale = x.col(j).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if sigmas[j] <= 1e-12 * scale || sigmas[j] == 0.0 {
            return Err(Error::ConstantFeature(d.feature_names()[j].clone()));
        }
    }
    let params = NormalizationParams { means, sigmas };
    Ok((params.apply(d)?, params))
}

/// A random partition of a dataset into training and validation points.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub train: LabeledDataset,
    pub val: LabeledDataset,
    pub train_indices: Vec<usize>,
    pub val_indices: Vec<usize>,
    pub split_seed: u64,
    pub train_fraction: f64,
}

/// Shuffles the point indices and cuts them after `round(fraction · m)`.
pub fn split(d: &LabeledDataset, train_fraction: f64, seed: u64) -> Result<SplitPair> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Precondition(format!(
            "train fraction {train_fraction} is not in (0, 1)"
        )));
    }
    let m = d.len();
    let n_train = (train_fraction * m as f64).round() as usize;
    if n_train == 0 || n_train == m {
        return Err(Error::Size(format!(
            "fraction {train_fraction} of {m} points leaves an empty partition"
        )));
    }
    let mut idx: Vec<usize> = (0..m).collect();
    idx.shuffle(&mut rng::from_seed(seed));
    let val_indices = idx.split_off(n_train);
    let train_indices = idx;
    Ok(SplitPair {
        train: d.subset(&train_indices)?,
        val: d.subset(&val_indices)?,
        train_indices,
        val_indices,
        split_seed: seed,
        train_fraction,
    })
}

/// Parameters of `y = w_trueᵀx + ε` with `x ~ N(0, I)` and `ε ~ N(0, σ²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyModelSpec {
    pub w_true: Vec<f64>,
    pub noise_variance: f64,
    pub sample_count: usize,
    pub seed: u64,
}

impl ToyModelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.w_true.is_empty() {
            return Err(Error::Precondition("w_true must have at least one entry".into()));
        }
        if !(self.noise_variance >= 0.0) || !self.noise_variance.is_finite() {
            return Err(Error::Precondition(format!(
                "noise variance {} must be finite and non-negative",
                self.noise_variance
            )));
        }
        if self.sample_count == 0 {
            return Err(Error::Precondition("sample count must be positive".into()));
        }
        if !vector::all_finite(&self.w_true) {
            return Err(Error::Precondition("w_true must be finite".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.w_true.len()
    }
}

pub fn generate_toy(spec: &ToyModelSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut r = rng::from_seed(spec.seed);
    sample_toy(&spec.w_true, spec.noise_variance, spec.sample_count, &mut r)
}

/// Draws `m` points of the toy model from an existing stream.
pub fn sample_toy(
    w_true: &[f64],
    noise_variance: f64,
    m: usize,
    r: &mut rng::Rng,
) -> Result<LabeledDataset> {
    let n = w_true.len();
    let sigma = noise_variance.sqrt();
    let mut data = Vec::with_capacity(m * n);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let x = rng::standard_normal_vec(r, n);
        let noise = if sigma > 0.0 {
            sigma * rng::standard_normal(r)
        } else {
            0.0
        };
        labels.push(vector::dot(w_true, &x) + noise);
        data.extend(x);
    }
    LabeledDataset::regression(DenseMatrix::new(m, n, data)?, labels)
}
