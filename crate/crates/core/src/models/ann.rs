use serde::{Deserialize, Serialize};

use super::Predictor;
use crate::error::{Error, Result};
use crate::numerics::{vector, DenseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Sigmoid,
    /// `g(z) = scale · z`
    Linear { scale: f64 },
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Linear { scale } => scale * z,
        }
    }
}

/// Network with one hidden layer: `h(x) = Σ_j out_j · g(Σ_i in_{j,i} x_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnSpec {
    pub input_dim: usize,
    pub hidden_dim: usize,
    /// `hidden_dim × input_dim`
    pub weights_in: DenseMatrix,
    pub weights_out: Vec<f64>,
    pub activation: Activation,
}

impl AnnSpec {
    pub fn new(weights_in: DenseMatrix, weights_out: Vec<f64>, activation: Activation) -> Result<Self> {
        let (hidden_dim, input_dim) = weights_in.shape();
        if weights_out.len() != hidden_dim {
            return Err(Error::Shape(format!(
                "{} output weights for {hidden_dim} hidden units",
                weights_out.len()
            )));
        }
        if !vector::all_finite(&weights_out) {
            return Err(Error::Numeric("output weights must be finite".into()));
        }
        Ok(Self {
            input_dim,
            hidden_dim,
            weights_in,
            weights_out,
            activation,
        })
    }
}

impl Predictor for AnnSpec {
    fn predict(&self, x: &[f64]) -> Result<f64> {
        ann_forward(self, x)
    }
}

pub fn ann_forward(spec: &AnnSpec, x: &[f64]) -> Result<f64> {
    if x.len() != spec.input_dim || spec.weights_in.shape() != (spec.hidden_dim, spec.input_dim) {
        return Err(Error::Shape(format!(
            "input of length {} for a network with {} inputs",
            x.len(),
            spec.input_dim
        )));
    }
    let hidden = spec.weights_in.matvec(x)?;
    Ok(hidden
        .iter()
        .zip(&spec.weights_out)
        .map(|(z, w)| w * spec.activation.apply(*z))
        .sum())
}
