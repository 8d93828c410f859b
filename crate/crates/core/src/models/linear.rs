use serde::{Deserialize, Serialize};

use super::Predictor;
use crate::error::{Error, Result};
use crate::numerics::vector;

/// Maps a raw input to the feature vector a linear model weighs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureMap {
    Identity,
    /// `x ↦ (1, x, x², …, x^max_degree)` for a scalar `x`.
    Polynomial { max_degree: usize },
    /// `x ↦ (exp(-(x-μ_j)²/(2σ²)))_j` for a scalar `x`; no constant term.
    Gaussian { means: Vec<f64>, variance: f64 },
}

impl FeatureMap {
    pub fn validate(&self) -> Result<()> {
        match self {
            FeatureMap::Gaussian { means, variance } => {
                if !(*variance > 0.0) {
                    return Err(Error::Precondition(format!(
                        "Gaussian basis variance {variance} must be positive"
                    )));
                }
                if !vector::all_finite(means) {
                    return Err(Error::Precondition("Gaussian basis means must be finite".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Length of `φ(x)` for an input of length `input_dim`.
    pub fn output_len(&self, input_dim: usize) -> usize {
        match self {
            FeatureMap::Identity => input_dim,
            FeatureMap::Polynomial { max_degree } => max_degree + 1,
            FeatureMap::Gaussian { means, .. } => means.len(),
        }
    }

    pub fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            FeatureMap::Identity => Ok(x.to_vec()),
            _ => match x {
                [v] => Ok(apply_feature_map(self, *v)),
                _ => Err(Error::Shape(format!(
                    "{self:?} expects a scalar input, got length {}",
                    x.len()
                ))),
            },
        }
    }
}

/// Feature vector of a scalar input.
pub fn apply_feature_map(spec: &FeatureMap, x: f64) -> Vec<f64> {
    match spec {
        FeatureMap::Identity => vec![x],
        FeatureMap::Polynomial { max_degree } => {
            let mut out = Vec::with_capacity(max_degree + 1);
            let mut p = 1.0;
            for _ in 0..=*max_degree {
                out.push(p);
                p *= x;
            }
            out
        }
        FeatureMap::Gaussian { means, variance } => means
            .iter()
            .map(|mu| (-(x - mu).powi(2) / (2.0 * variance)).exp())
            .collect(),
    }
}

/// `h(x) = wᵀφ(x)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_map: Option<FeatureMap>,
}

impl LinearModel {
    pub fn new(weights: Vec<f64>) -> Self {
        Self {
            weights,
            feature_map: None,
        }
    }

    pub fn with_feature_map(weights: Vec<f64>, feature_map: FeatureMap) -> Result<Self> {
        feature_map.validate()?;
        if let FeatureMap::Polynomial { .. } | FeatureMap::Gaussian { .. } = feature_map {
            if feature_map.output_len(1) != weights.len() {
                return Err(Error::Shape(format!(
                    "feature map produces {} features, got {} weights",
                    feature_map.output_len(1),
                    weights.len()
                )));
            }
        }
        Ok(Self {
            weights,
            feature_map: Some(feature_map),
        })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }
}

impl Predictor for LinearModel {
    fn predict(&self, x: &[f64]) -> Result<f64> {
        predict_linear(self, x)
    }

    fn weights(&self) -> Option<&[f64]> {
        Some(&self.weights)
    }
}

pub fn predict_linear(model: &LinearModel, x: &[f64]) -> Result<f64> {
    let phi;
    let features = match &model.feature_map {
        None => x,
        Some(map) => {
            phi = map.features(x)?;
            &phi
        }
    };
    if features.len() != model.weights.len() {
        return Err(Error::Shape(format!(
            "{} features for {} weights",
            features.len(),
            model.weights.len()
        )));
    }
    Ok(vector::dot(&model.weights, features))
}

/// `+1` if `h ≥ 0`, otherwise `-1`.
pub fn classify(h_value: f64) -> f64 {
    if h_value >= 0.0 {
        1.0
    } else {
        -1.0
    }
}
