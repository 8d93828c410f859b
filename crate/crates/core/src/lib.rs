//! Empirical risk minimization from first principles.
//!
//! The crate bundles the pieces needed to learn predictors by minimizing an
//! average loss over a labeled dataset:
//!
//! - [`numerics`]: a small dense linear-algebra kernel (Jacobi eigensolver,
//!   Cholesky solves, power iteration, condition numbers).
//! - [`data`]: datasets, CSV ingestion, normalization, splitting and the
//!   linear-Gaussian toy model generator.
//! - [`models`]: hypothesis spaces (linear maps with feature maps, a one hidden
//!   layer network, decision trees, nearest neighbours).
//! - [`losses`]: squared, 0/1, hinge, logistic and soft-margin losses.
//! - [`optimize`]: gradient descent with Hessian-based step sizes, SGD and
//!   subgradient descent.
//! - [`learners`]: closed-form and iterative estimators.
//! - [`validate`]: train/validation errors, model selection, diagnosis and
//!   Monte-Carlo bias/variance experiments.
//! - [`cluster`]: k-means and Gaussian mixture EM.
//! - [`dimred`]: PCA and random projections.

pub mod cluster;
pub mod data;
pub mod dimred;
pub mod error;
pub mod learners;
pub mod losses;
pub mod models;
pub mod numerics;
pub mod optimize;
pub mod rng;
pub mod validate;

pub use error::{Error, Result};
