//! Hard clustering with k-means and soft clustering with Gaussian mixtures.
//!
//! Cluster indices are 0-based throughout.

mod gmm;
mod kmeans;

pub use gmm::{gmm_em, gmm_hard_limit_check, GmmConfig, GmmInit, GmmParams, SoftClustering};
pub use kmeans::{
    clustering_error, elbow_sweep, kmeans, kmeans_multi_restart, kmeans_step, nearest_mean, HardClustering,
    KmeansConfig, KmeansInit, RestartSummary,
};

use rand::seq::index;

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;
use crate::rng::Rng;

/// `k` distinct data points drawn uniformly, used as initial means.
pub(crate) fn sample_point_means(points: &DenseMatrix, k: usize, rng: &mut Rng) -> Result<DenseMatrix> {
    check_k(points, k)?;
    let idx = index::sample(rng, points.rows(), k).into_vec();
    Ok(points.select_rows(&idx))
}

pub(crate) fn check_k(points: &DenseMatrix, k: usize) -> Result<()> {
    if points.rows() == 0 {
        return Err(Error::Size("cannot cluster an empty dataset".into()));
    }
    if k == 0 || k > points.rows() {
        return Err(Error::Size(format!(
            "k = {k} must lie in 1..={} (number of points)",
            points.rows()
        )));
    }
    Ok(())
}
