//! Estimators that turn a labeled dataset into a fitted predictor.
//!
//! No intercept is added implicitly; prepend a constant feature with
//! [`LabeledDataset::prepend_constant`](crate::data::LabeledDataset::prepend_constant)
//! when one is wanted.

mod bayes;
mod linear;
mod tree;

pub use bayes::{bayes_weights, fit_bayes, gaussian_ml, GaussianClassParams};
pub use linear::{
    fit_linreg_closed, fit_linreg_gd, fit_linreg_min_norm, fit_logreg, fit_ridge_closed, fit_ridge_gd,
    fit_svm, logistic_probability, RidgeSpec,
};
pub use tree::{default_thresholds, grow_tree};
