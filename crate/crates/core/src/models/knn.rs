use serde::{Deserialize, Serialize};

use super::{classify, Predictor};
use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::numerics::{vector, DenseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnnMode {
    /// Average of the neighbour labels.
    Mean,
    /// Majority vote over `{-1, +1}` labels; ties go to `+1`.
    Majority,
}

/// Predicts from the `k` nearest training points (Euclidean distance).
///
/// Equal distances are ordered by data-point index, so the earlier point wins.
pub fn knn_predict(train: &LabeledDataset, k: usize, x: &[f64], mode: KnnMode) -> Result<f64> {
    train.require_labels()?;
    let m = train.len();
    if m == 0 {
        return Err(Error::Size("empty training set".into()));
    }
    if k == 0 || k > m {
        return Err(Error::Size(format!("k = {k} must lie in 1..={m}")));
    }
    if x.len() != train.dim() {
        return Err(Error::Shape(format!(
            "query of length {} for {} features",
            x.len(),
            train.dim()
        )));
    }
    let mut order: Vec<(f64, usize)> = (0..m)
        .map(|i| (vector::squared_distance(train.point(i), x), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let neighbours = &order[..k];
    let sum: f64 = neighbours.iter().map(|&(_, i)| train.label(i)).sum();
    Ok(match mode {
        KnnMode::Mean => sum / k as f64,
        KnnMode::Majority => classify(sum),
    })
}

/// A stored training set plus the neighbourhood size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub mode: KnnMode,
    pub points: DenseMatrix,
    pub labels: Vec<f64>,
}

impl KnnModel {
    pub fn new(train: &LabeledDataset, k: usize, mode: KnnMode) -> Result<Self> {
        train.require_labels()?;
        if k == 0 || k > train.len() {
            return Err(Error::Size(format!("k = {k} must lie in 1..={}", train.len())));
        }
        Ok(Self {
            k,
            mode,
            points: train.features().clone(),
            labels: train.labels().to_vec(),
        })
    }
}

impl Predictor for KnnModel {
    fn predict(&self, x: &[f64]) -> Result<f64> {
        let kind = match self.mode {
            KnnMode::Mean => crate::data::LabelKind::Real,
            KnnMode::Majority => crate::data::LabelKind::Binary,
        };
        let train = LabeledDataset::new(self.points.clone(), self.labels.clone(), kind)?;
        knn_predict(&train, self.k, x, self.mode)
    }
}
