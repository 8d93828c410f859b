//! Validation: train/validation errors, model selection, diagnosis and
//! Monte-Carlo bias/variance experiments on the linear-Gaussian toy model.

mod biasvar;
mod selection;

pub use biasvar::{
    bias_variance_experiment, ridge_bias_variance_experiment, write_sweep_csv, BiasVarianceResult,
    Estimator,
};
pub use selection::{
    diagnose, select_model, select_model_on_split, train_val_errors, CandidateResult, Diagnosis,
    HypothesisSpace, ModelSelectionReport,
};
