//! Hypothesis spaces and their evaluation.

mod ann;
mod knn;
mod linear;
mod tree;

pub use ann::{ann_forward, Activation, AnnSpec};
pub use knn::{knn_predict, KnnMode, KnnModel};
pub use linear::{apply_feature_map, classify, predict_linear, FeatureMap, LinearModel};
pub use tree::{tree_predict, DecisionTree, TreeNode};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Anything that maps a feature vector to a real prediction.
pub trait Predictor {
    fn predict(&self, x: &[f64]) -> Result<f64>;

    /// Weight vector entering a norm penalty, if the hypothesis has one.
    fn weights(&self) -> Option<&[f64]> {
        None
    }
}

/// A fitted model in its serialized form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Linear(LinearModel),
    Tree(DecisionTree),
    Knn(KnnModel),
    Ann(AnnSpec),
}

impl Predictor for Model {
    fn predict(&self, x: &[f64]) -> Result<f64> {
        match self {
            Model::Linear(m) => m.predict(x),
            Model::Tree(t) => t.predict(x),
            Model::Knn(k) => k.predict(x),
            Model::Ann(a) => a.predict(x),
        }
    }

    fn weights(&self) -> Option<&[f64]> {
        match self {
            Model::Linear(m) => Some(&m.weights),
            _ => None,
        }
    }
}

impl Model {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
