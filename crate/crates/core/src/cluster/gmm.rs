use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::kmeans::{initial_means, nearest_mean, HardClustering, KmeansInit};
use super::{check_k, sample_point_means};
use crate::error::{Error, Result};
use crate::learners::gaussian_ml;
use crate::numerics::{cholesky, sym_evd, vector, DenseMatrix};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmParams {
    pub means: Vec<Vec<f64>>,
    pub covariances: Vec<DenseMatrix>,
    /// Mixture probabilities; they sum to one.
    pub weights: Vec<f64>,
}

impl GmmParams {
    pub fn k(&self) -> usize {
        self.means.len()
    }

    fn validate(&self, n: usize) -> Result<()> {
        let k = self.means.len();
        if k == 0 || self.covariances.len() != k || self.weights.len() != k {
            return Err(Error::Shape("mixture needs matching means, covariances and weights".into()));
        }
        for (mu, c) in self.means.iter().zip(&self.covariances) {
            if mu.len() != n || c.shape() != (n, n) {
                return Err(Error::Shape(format!("component shapes do not match {n} features")));
            }
        }
        let total: f64 = self.weights.iter().sum();
        if self.weights.iter().any(|&p| p < 0.0) || (total - 1.0).abs() > 1e-10 {
            return Err(Error::Precondition("mixture weights must be a probability vector".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GmmInit {
    /// Random distinct data points as means, the data covariance for every
    /// component and uniform weights.
    SamplePoints,
    Provided { params: GmmParams },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmConfig {
    pub k: usize,
    pub init: GmmInit,
    pub max_iters: usize,
    /// Stop once the average negative log-likelihood decreases by at most this much.
    pub tol: f64,
    pub seed: u64,
    /// Smallest eigenvalue tolerated in a component covariance.
    pub covariance_floor: f64,
}

impl GmmConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            init: GmmInit::SamplePoints,
            max_iters: 500,
            tol: 1e-10,
            seed,
            covariance_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftClustering {
    /// `degrees[(i, c)]`: posterior probability that point `i` belongs to cluster `c`.
    pub degrees: DenseMatrix,
    pub params: GmmParams,
    /// Average negative log-likelihood before the first and after every iteration.
    pub nll_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl SoftClustering {
    /// Cluster with the largest degree for every point (smaller index on ties).
    pub fn hard_assignments(&self) -> Vec<usize> {
        argmax_rows(&self.degrees)
    }

    /// `index,degree_0,…,degree_{k-1}` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["index".to_string()];
        header.extend((0..self.degrees.cols()).map(|c| format!("degree_{c}")));
        w.write_record(&header)?;
        for (i, row) in self.degrees.row_iter().enumerate() {
            let mut rec = vec![i.to_string()];
            rec.extend(row.iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn argmax_rows(m: &DenseMatrix) -> Vec<usize> {
    m.row_iter()
        .map(|row| {
            let mut best = 0;
            for (c, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Log-density evaluator for one Gaussian component.
struct Component {
    chol: crate::numerics::Cholesky,
    mean: Vec<f64>,
    log_norm: f64,
}

impl Component {
    fn new(mean: &[f64], cov: &DenseMatrix) -> Result<Self> {
        let chol = cholesky(cov)?;
        let n = mean.len() as f64;
        let log_norm = -0.5 * (n * (2.0 * PI).ln() + chol.log_det());
        Ok(Self {
            chol,
            mean: mean.to_vec(),
            log_norm,
        })
    }

    fn log_pdf(&self, x: &[f64]) -> f64 {
        let z = self.chol.whiten(&vector::sub(x, &self.mean));
        self.log_norm - 0.5 * vector::dot(&z, &z)
    }
}

/// Responsibilities and average negative log-likelihood for the current parameters.
fn e_step(points: &DenseMatrix, params: &GmmParams) -> Result<(DenseMatrix, f64)> {
    let comps = params
        .means
        .iter()
        .zip(&params.covariances)
        .map(|(m, c)| Component::new(m, c))
        .collect::<Result<Vec<_>>>()?;
    let log_w: Vec<f64> = params.weights.iter().map(|p| p.ln()).collect();
    let (m, k) = (points.rows(), params.k());
    let mut degrees = DenseMatrix::zeros(m, k);
    let mut total = 0.0;
    let mut logs = vec![0.0; k];
    for (i, x) in points.row_iter().enumerate() {
        for c in 0..k {
            logs[c] = log_w[c] + comps[c].log_pdf(x);
        }
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let row = degrees.row_mut(i);
        if !top.is_finite() {
            // every component density underflowed
            row.fill(1.0 / k as f64);
            total += top;
            continue;
        }
        let s: f64 = logs.iter().map(|l| (l - top).exp()).sum();
        let lse = top + s.ln();
        for c in 0..k {
            row[c] = (logs[c] - lse).exp();
        }
        total += lse;
    }
    Ok((degrees, -total / m as f64))
}

/// Adds `max(1e-6·tr(C)/n, floor)·I` when the smallest eigenvalue is below `floor`.
fn regularize(cov: DenseMatrix, floor: f64) -> Result<DenseMatrix> {
    let evd = sym_evd(&cov)?;
    let lambda_min = *evd.eigenvalues.last().expect("nonempty spectrum");
    if lambda_min >= floor {
        return Ok(cov);
    }
    let n = cov.rows() as f64;
    Ok(cov.add_diag((1e-6 * cov.trace() / n).max(floor)))
}

/// Parameter update from responsibilities; components with no mass keep their parameters.
fn m_step(
    points: &DenseMatrix,
    degrees: &DenseMatrix,
    prev: &GmmParams,
    floor: f64,
    fixed_cov: bool,
) -> Result<GmmParams> {
    let (m, n) = points.shape();
    let k = prev.k();
    let mut next = prev.clone();
    for c in 0..k {
        let mass: f64 = (0..m).map(|i| degrees.get(i, c)).sum();
        next.weights[c] = mass / m as f64;
        if mass <= 0.0 {
            continue;
        }
        let mut mu = vec![0.0; n];
        for (i, x) in points.row_iter().enumerate() {
            vector::axpy(degrees.get(i, c) / mass, x, &mut mu);
        }
        if !fixed_cov {
            let mut cov = DenseMatrix::zeros(n, n);
            for (i, x) in points.row_iter().enumerate() {
                let w = degrees.get(i, c) / mass;
                if w == 0.0 {
                    continue;
                }
                let d = vector::sub(x, &mu);
                for a in 0..n {
                    for b in a..n {
                        let v = cov.get(a, b) + w * d[a] * d[b];
                        cov.set(a, b, v);
                    }
                }
            }
            for a in 0..n {
                for b in 0..a {
                    let v = cov.get(b, a);
                    cov.set(a, b, v);
                }
            }
            next.covariances[c] = regularize(cov, floor)?;
        }
        next.means[c] = mu;
    }
    let total: f64 = next.weights.iter().sum();
    for p in &mut next.weights {
        *p /= total;
    }
    Ok(next)
}

fn initial_params(points: &DenseMatrix, config: &GmmConfig) -> Result<GmmParams> {
    check_k(points, config.k)?;
    match &config.init {
        GmmInit::Provided { params } => {
            params.validate(points.cols())?;
            if params.k() != config.k {
                return Err(Error::Shape(format!(
                    "provided mixture has {} components, expected {}",
                    params.k(),
                    config.k
                )));
            }
            Ok(params.clone())
        }
        GmmInit::SamplePoints => {
            let means = sample_point_means(points, config.k, &mut rng::from_seed(config.seed))?;
            let (_, cov) = gaussian_ml(points)?;
            let cov = regularize(cov, config.covariance_floor)?;
            Ok(GmmParams {
                means: means.row_iter().map(<[f64]>::to_vec).collect(),
                covariances: vec![cov; config.k],
                weights: vec![1.0 / config.k as f64; config.k],
            })
        }
    }
}

/// Soft clustering by expectation-maximization for a Gaussian mixture.
pub fn gmm_em(points: &DenseMatrix, config: &GmmConfig) -> Result<SoftClustering> {
    if !(config.covariance_floor > 0.0) {
        return Err(Error::Precondition("covariance floor must be positive".into()));
    }
    if config.max_iters == 0 {
        return Err(Error::Precondition("max_iters must be at least 1".into()));
    }
    let mut params = initial_params(points, config)?;
    let (mut degrees, nll) = e_step(points, &params)?;
    let mut trace = vec![nll];
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=config.max_iters {
        params = m_step(points, &degrees, &params, config.covariance_floor, false)?;
        let (d, nll) = e_step(points, &params)?;
        degrees = d;
        iterations = it;
        let prev = *trace.last().expect("trace starts nonempty");
        trace.push(nll);
        if prev - nll <= config.tol {
            converged = true;
            break;
        }
    }
    Ok(SoftClustering {
        degrees,
        params,
        nll_trace: trace,
        iterations,
        converged,
    })
}

/// EM with every covariance fixed at `σ²I`, rounded to hard assignments.
///
/// Initial means follow `init` exactly as in [`kmeans`](super::kmeans), so
/// for small `σ²` the result can be compared with k-means from the same start.
pub fn gmm_hard_limit_check(
    points: &DenseMatrix,
    k: usize,
    sigma2: f64,
    init: &KmeansInit,
    seed: u64,
) -> Result<HardClustering> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::Precondition(format!("variance must be positive, got {sigma2}")));
    }
    let n = points.cols();
    let means = initial_means(points, k, init, seed)?;
    let mut params = GmmParams {
        means: means.row_iter().map(<[f64]>::to_vec).collect(),
        covariances: vec![DenseMatrix::identity(n).scaled(sigma2); k],
        weights: vec![1.0 / k as f64; k],
    };
    let mut assignments: Vec<usize> = points.row_iter().map(|x| nearest_mean(x, &means)).collect();
    let mut trace = vec![hard_error(points, &assignments, &params)?];
    const MAX_ITERS: usize = 10_000;
    for it in 1..=MAX_ITERS {
        let (degrees, _) = e_step(points, &params)?;
        params = m_step(points, &degrees, &params, f64::MIN_POSITIVE, true)?;
        let (degrees, _) = e_step(points, &params)?;
        let next = argmax_rows(&degrees);
        trace.push(hard_error(points, &next, &params)?);
        let done = next == assignments && it > 1;
        assignments = next;
        if done {
            let error = *trace.last().expect("nonempty");
            return Ok(HardClustering {
                assignments,
                means: DenseMatrix::from_rows(&params.means)?,
                error,
                error_trace: trace,
                iterations: it,
            });
        }
    }
    Err(Error::Convergence {
        iterations: MAX_ITERS,
        what: "hard-limit EM assignments kept changing".into(),
    })
}

fn hard_error(points: &DenseMatrix, assignments: &[usize], params: &GmmParams) -> Result<f64> {
    super::clustering_error(points, assignments, &DenseMatrix::from_rows(&params.means)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{kmeans, KmeansConfig};
    use approx::assert_relative_eq;

    fn blobs(seed: u64, per: usize, centers: &[[f64; 2]], spread: f64) -> DenseMatrix {
        let mut r = rng::from_seed(seed);
        let mut rows = Vec::new();
        for c in centers {
            for _ in 0..per {
                let g = rng::standard_normal_vec(&mut r, 2);
                rows.push([c[0] + spread * g[0], c[1] + spread * g[1]]);
            }
        }
        DenseMatrix::from_rows(&rows).unwrap()
    }

    fn assert_probability_rows(d: &DenseMatrix) {
        for row in d.row_iter() {
            assert!(row.iter().all(|&v| v >= 0.0));
            assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn single_component_is_the_ml_gaussian() {
        let x = blobs(1, 50, &[[1.0, 2.0]], 1.5);
        let res = gmm_em(&x, &GmmConfig::new(1, 0)).unwrap();
        let (mu, cov) = gaussian_ml(&x).unwrap();
        assert_relative_eq!(res.params.means[0][0], mu[0], epsilon = 1e-12);
        assert_relative_eq!(res.params.means[0][1], mu[1], epsilon = 1e-12);
        for (a, b) in res.params.covariances[0].as_slice().iter().zip(cov.as_slice()) {
            assert_relative_eq!(*a, *b, epsilon = 1e-12);
        }
        assert_eq!(res.params.weights, vec![1.0]);
        assert!(res.degrees.as_slice().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn midpoint_is_split_evenly() {
        let params = GmmParams {
            means: vec![vec![-2.0, 0.0], vec![2.0, 0.0]],
            covariances: vec![DenseMatrix::identity(2); 2],
            weights: vec![0.5, 0.5],
        };
        let x = DenseMatrix::from_rows(&[[0.0, 0.0], [0.0, 3.0]]).unwrap();
        let (d, _) = e_step(&x, &params).unwrap();
        for row in d.row_iter() {
            assert_relative_eq!(row[0], 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn likelihood_never_increases() {
        for seed in 0..5 {
            let x = blobs(seed, 40, &[[0.0, 0.0], [4.0, 1.0], [1.0, 5.0]], 1.0);
            let res = gmm_em(&x, &GmmConfig::new(3, seed)).unwrap();
            for p in res.nll_trace.windows(2) {
                assert!(p[1] <= p[0] + 1e-9);
            }
            assert_probability_rows(&res.degrees);
            assert!((res.params.weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn collapse_is_regularized() {
        // a component sitting on a repeated point would otherwise become singular
        let x = DenseMatrix::from_rows(&[[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [5.0, 5.0], [6.0, 5.0], [5.0, 7.0]])
            .unwrap();
        let res = gmm_em(&x, &GmmConfig::new(2, 3)).unwrap();
        for c in &res.params.covariances {
            let evd = sym_evd(c).unwrap();
            assert!(evd.eigenvalues.iter().all(|&l| l > 0.0));
        }
        assert_probability_rows(&res.degrees);
    }

    #[test]
    fn huge_variance_gives_uniform_degrees() {
        let params = GmmParams {
            means: vec![vec![0.0], vec![1.0], vec![2.0]],
            covariances: vec![DenseMatrix::identity(1).scaled(1e12); 3],
            weights: vec![1.0 / 3.0; 3],
        };
        let x = DenseMatrix::from_rows(&[[0.0], [5.0]]).unwrap();
        let (d, _) = e_step(&x, &params).unwrap();
        assert!(d.as_slice().iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-9));
    }

    #[test]
    fn hard_limit_matches_kmeans() {
        for seed in 0..3 {
            let x = blobs(seed, 15, &[[0.0, 0.0], [8.0, 0.0], [0.0, 8.0]], 1.0);
            let hard = gmm_hard_limit_check(&x, 3, 1e-9, &KmeansInit::SamplePoints, seed).unwrap();
            let km = kmeans(&x, &KmeansConfig::new(3, seed)).unwrap();
            assert_eq!(hard.assignments, km.assignments);
        }
        let x = blobs(0, 10, &[[0.0, 0.0]], 1.0);
        let one = gmm_hard_limit_check(&x, 1, 1e-9, &KmeansInit::SamplePoints, 0).unwrap();
        assert!(one.assignments.iter().all(|&a| a == 0));
    }

    #[test]
    fn provided_params_are_checked() {
        let x = blobs(0, 5, &[[0.0, 0.0]], 1.0);
        let bad = GmmParams {
            means: vec![vec![0.0, 0.0]],
            covariances: vec![DenseMatrix::identity(2)],
            weights: vec![0.7],
        };
        let cfg = GmmConfig {
            init: GmmInit::Provided { params: bad },
            ..GmmConfig::new(1, 0)
        };
        assert!(gmm_em(&x, &cfg).is_err());
    }

    #[test]
    fn degrees_csv() {
        let x = blobs(0, 3, &[[0.0, 0.0]], 1.0);
        let res = gmm_em(&x, &GmmConfig::new(1, 0)).unwrap();
        let mut buf = Vec::new();
        res.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "index,degree_0");
        assert_eq!(text.lines().count(), 4);
    }
}
