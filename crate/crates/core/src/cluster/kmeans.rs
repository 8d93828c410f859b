use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_k, sample_point_means};
use crate::error::{Error, Result};
use crate::learners::gaussian_ml;
use crate::numerics::{sym_evd, vector, DenseMatrix};
use crate::rng::{self, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KmeansInit {
    /// Means drawn from a Gaussian with the sample mean and covariance.
    RandomNormal,
    /// Distinct data points chosen uniformly at random.
    SamplePoints,
    Provided { means: DenseMatrix },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmeansConfig {
    pub k: usize,
    pub init: KmeansInit,
    /// Stop once the clustering error decreases by at most this much.
    pub epsilon: f64,
    pub seed: u64,
    /// Safety cap; exceeding it is reported as a convergence error.
    pub max_iters: usize,
}

impl KmeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            init: KmeansInit::SamplePoints,
            epsilon: 0.0,
            seed,
            max_iters: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardClustering {
    pub assignments: Vec<usize>,
    /// One row per cluster.
    pub means: DenseMatrix,
    pub error: f64,
    /// Clustering error after initialization and after every iteration.
    pub error_trace: Vec<f64>,
    pub iterations: usize,
}

impl HardClustering {
    pub fn k(&self) -> usize {
        self.means.rows()
    }

    /// `index,cluster` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["index", "cluster"])?;
        for (i, c) in self.assignments.iter().enumerate() {
            w.write_record([i.to_string(), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Mean squared distance of every point to its assigned mean.
pub fn clustering_error(points: &DenseMatrix, assignments: &[usize], means: &DenseMatrix) -> Result<f64> {
    if assignments.len() != points.rows() {
        return Err(Error::Shape(format!(
            "{} assignments for {} points",
            assignments.len(),
            points.rows()
        )));
    }
    if points.rows() == 0 {
        return Err(Error::Size("clustering error of an empty dataset".into()));
    }
    let mut total = 0.0;
    for (x, &c) in points.row_iter().zip(assignments) {
        if c >= means.rows() {
            return Err(Error::Shape(format!("cluster {c} out of range for {} means", means.rows())));
        }
        total += vector::squared_distance(x, means.row(c));
    }
    Ok(total / points.rows() as f64)
}

/// Index of the closest mean; equal distances go to the smaller index.
pub fn nearest_mean(x: &[f64], means: &DenseMatrix) -> usize {
    let mut best = (f64::INFINITY, 0);
    for c in 0..means.rows() {
        let dist = vector::squared_distance(x, means.row(c));
        if dist < best.0 {
            best = (dist, c);
        }
    }
    best.1
}

fn assign(points: &DenseMatrix, means: &DenseMatrix) -> Vec<usize> {
    points.row_iter().map(|x| nearest_mean(x, means)).collect()
}

/// One iteration: reassign every point, then move each nonempty cluster's
/// mean to its centroid. Empty clusters keep their previous mean.
///
/// Returns the new assignments, means and clustering error.
pub fn kmeans_step(points: &DenseMatrix, means: &DenseMatrix) -> Result<(Vec<usize>, DenseMatrix, f64)> {
    if points.cols() != means.cols() {
        return Err(Error::Shape(format!(
            "points have {} features but means have {}",
            points.cols(),
            means.cols()
        )));
    }
    let assignments = assign(points, means);
    let (k, n) = means.shape();
    let mut sums = DenseMatrix::zeros(k, n);
    let mut counts = vec![0usize; k];
    for (x, &c) in points.row_iter().zip(&assignments) {
        counts[c] += 1;
        vector::axpy(1.0, x, sums.row_mut(c));
    }
    let mut next = means.clone();
    for c in 0..k {
        if counts[c] > 0 {
            let inv = 1.0 / counts[c] as f64;
            for (dst, s) in next.row_mut(c).iter_mut().zip(sums.row(c)) {
                *dst = s * inv;
            }
        }
    }
    let error = clustering_error(points, &assignments, &next)?;
    Ok((assignments, next, error))
}

fn random_normal_means(points: &DenseMatrix, k: usize, rng: &mut Rng) -> Result<DenseMatrix> {
    let (mu, cov) = gaussian_ml(points)?;
    let evd = sym_evd(&cov)?;
    let n = mu.len();
    let mut means = DenseMatrix::zeros(k, n);
    for c in 0..k {
        let g = rng::standard_normal_vec(rng, n);
        let row = means.row_mut(c);
        row.copy_from_slice(&mu);
        for (l, &lambda) in evd.eigenvalues.iter().enumerate() {
            let s = lambda.max(0.0).sqrt() * g[l];
            for (i, v) in row.iter_mut().enumerate() {
                *v += evd.eigenvectors.get(i, l) * s;
            }
        }
    }
    Ok(means)
}

pub(crate) fn initial_means(points: &DenseMatrix, k: usize, init: &KmeansInit, seed: u64) -> Result<DenseMatrix> {
    check_k(points, k)?;
    let mut r = rng::from_seed(seed);
    match init {
        KmeansInit::SamplePoints => sample_point_means(points, k, &mut r),
        KmeansInit::RandomNormal => random_normal_means(points, k, &mut r),
        KmeansInit::Provided { means } => {
            if means.shape() != (k, points.cols()) {
                return Err(Error::Shape(format!(
                    "provided means are {:?}, expected ({k}, {})",
                    means.shape(),
                    points.cols()
                )));
            }
            Ok(means.clone())
        }
    }
}

/// Alternates assignment and mean updates until the clustering error stops
/// decreasing by more than `epsilon`.
pub fn kmeans(points: &DenseMatrix, config: &KmeansConfig) -> Result<HardClustering> {
    if !(config.epsilon >= 0.0) {
        return Err(Error::Precondition(format!("epsilon must be nonnegative, got {}", config.epsilon)));
    }
    let mut means = initial_means(points, config.k, &config.init, config.seed)?;
    let mut assignments = assign(points, &means);
    let mut error = clustering_error(points, &assignments, &means)?;
    let mut trace = vec![error];
    for iteration in 1..=config.max_iters {
        let (a, m, e) = kmeans_step(points, &means)?;
        trace.push(e);
        let decrease = error - e;
        assignments = a;
        means = m;
        error = e;
        if decrease <= config.epsilon {
            return Ok(HardClustering {
                assignments,
                means,
                error,
                error_trace: trace,
                iterations: iteration,
            });
        }
    }
    Err(Error::Convergence {
        iterations: config.max_iters,
        what: "k-means clustering error kept decreasing".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub best: HardClustering,
    pub best_restart: usize,
    /// Final clustering error of every restart.
    pub restart_errors: Vec<f64>,
}

/// Runs k-means from `restarts` initializations and keeps the smallest error
/// (earliest restart on ties). Restart 0 uses `seed` itself.
pub fn kmeans_multi_restart(points: &DenseMatrix, config: &KmeansConfig, restarts: usize) -> Result<RestartSummary> {
    if restarts == 0 {
        return Err(Error::Precondition("at least one restart is required".into()));
    }
    let runs: Vec<HardClustering> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let cfg = KmeansConfig {
                seed: rng::substream_seed(config.seed, i as u64),
                ..config.clone()
            };
            kmeans(points, &cfg)
        })
        .collect::<Result<_>>()?;
    let restart_errors: Vec<f64> = runs.iter().map(|r| r.error).collect();
    let mut best_restart = 0;
    for (i, &e) in restart_errors.iter().enumerate() {
        if e < restart_errors[best_restart] {
            best_restart = i;
        }
    }
    let best = runs.into_iter().nth(best_restart).expect("restart index in range");
    Ok(RestartSummary {
        best,
        best_restart,
        restart_errors,
    })
}

/// Best clustering error for `k = 1..=k_max`.
///
/// Besides the random restarts, each `k > 1` also tries the previous best
/// means plus the point farthest from its mean, so the curve never rises.
pub fn elbow_sweep(points: &DenseMatrix, k_max: usize, restarts: usize, seed: u64) -> Result<Vec<(usize, f64)>> {
    check_k(points, k_max)?;
    let mut out = Vec::with_capacity(k_max);
    let mut prev: Option<HardClustering> = None;
    for k in 1..=k_max {
        let mut best = kmeans_multi_restart(points, &KmeansConfig::new(k, seed), restarts)?.best;
        if let Some(p) = &prev {
            let mut far = (0, -1.0);
            for (i, x) in points.row_iter().enumerate() {
                let dist = vector::squared_distance(x, p.means.row(p.assignments[i]));
                if dist > far.1 {
                    far = (i, dist);
                }
            }
            let mut rows: Vec<Vec<f64>> = p.means.row_iter().map(<[f64]>::to_vec).collect();
            rows.push(points.row(far.0).to_vec());
            let cfg = KmeansConfig {
                init: KmeansInit::Provided {
                    means: DenseMatrix::from_rows(&rows)?,
                },
                ..KmeansConfig::new(k, seed)
            };
            let warm = kmeans(points, &cfg)?;
            if warm.error < best.error {
                best = warm;
            }
        }
        out.push((k, best.error));
        prev = Some(best);
    }
    Ok(out)
}
