//! PCA, PCA-compressed regression and random projections.

use std::io::Write;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::learners::{fit_linreg_closed, fit_ridge_closed, RidgeSpec};
use crate::models::{LinearModel, Predictor};
use crate::numerics::{sym_evd, vector, DenseMatrix};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    /// `n × D`; rows are the leading eigenvectors of the sample covariance.
    pub compression: DenseMatrix,
    /// All `D` eigenvalues in descending order (tiny negative round-off clipped to 0).
    pub spectrum: Vec<f64>,
    pub n: usize,
    /// Mean subtracted before compressing, when fitted on centered data.
    pub center: Option<Vec<f64>>,
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.spectrum.len()
    }

    /// Average squared reconstruction error when keeping `n` components.
    pub fn error_for(&self, n: usize) -> f64 {
        self.spectrum[n.min(self.spectrum.len())..].iter().sum()
    }

    /// Error of this model's own component count.
    pub fn error(&self) -> f64 {
        self.error_for(self.n)
    }
}

/// Fits PCA on the rows of `points`, keeping `n` components.
///
/// The sample covariance is `(1/m) Σ zzᵀ`, computed on mean-centered points
/// when `center` is set.
pub fn fit_pca(points: &DenseMatrix, n: usize, center: bool) -> Result<PcaModel> {
    let (m, dim) = points.shape();
    if m == 0 {
        return Err(Error::Size("PCA needs at least one point".into()));
    }
    if n > dim {
        return Err(Error::Shape(format!("cannot keep {n} components of {dim}-dimensional data")));
    }
    let mean = if center {
        let mut mu = vec![0.0; dim];
        for row in points.row_iter() {
            vector::axpy(1.0 / m as f64, row, &mut mu);
        }
        Some(mu)
    } else {
        None
    };
    let z = match &mean {
        Some(mu) => {
            let rows: Vec<Vec<f64>> = points.row_iter().map(|r| vector::sub(r, mu)).collect();
            DenseMatrix::from_rows(&rows)?
        }
        None => points.clone(),
    };
    let q = z.gram().scaled(1.0 / m as f64);
    let evd = sym_evd(&q)?;
    let mut compression = DenseMatrix::zeros(n, dim);
    for l in 0..n {
        compression.row_mut(l).copy_from_slice(&evd.vector(l));
    }
    Ok(PcaModel {
        compression,
        spectrum: evd.eigenvalues.iter().map(|&v| v.max(0.0)).collect(),
        n,
        center: mean,
    })
}

/// `x = W (z - center)`.
pub fn compress(model: &PcaModel, z: &[f64]) -> Result<Vec<f64>> {
    if z.len() != model.input_dim() {
        return Err(Error::Shape(format!(
            "point of length {} for a {}-dimensional PCA",
            z.len(),
            model.input_dim()
        )));
    }
    match &model.center {
        Some(mu) => model.compression.matvec(&vector::sub(z, mu)),
        None => model.compression.matvec(z),
    }
}

/// `ẑ = Wᵀx + center`.
pub fn reconstruct(model: &PcaModel, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != model.n {
        return Err(Error::Shape(format!("{} features for {} components", x.len(), model.n)));
    }
    let z = model.compression.tmatvec(x)?;
    Ok(match &model.center {
        Some(mu) => vector::add(&z, mu),
        None => z,
    })
}

/// Average squared distance between each point and its reconstruction.
pub fn reconstruction_error(model: &PcaModel, points: &DenseMatrix) -> Result<f64> {
    let mut total = 0.0;
    for z in points.row_iter() {
        let back = reconstruct(model, &compress(model, z)?)?;
        total += vector::squared_distance(z, &back);
    }
    Ok(total / points.rows() as f64)
}

/// First two principal components of every point as `pc1,pc2` rows.
pub fn write_scatter_csv<W: Write>(model: &PcaModel, points: &DenseMatrix, writer: W) -> Result<()> {
    if model.n < 2 {
        return Err(Error::Precondition("a scatter export needs at least 2 components".into()));
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["pc1", "pc2"])?;
    for z in points.row_iter() {
        let x = compress(model, z)?;
        w.write_record([x[0].to_string(), x[1].to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionDist {
    Gaussian,
    /// Entries `±1` with equal probability.
    Bernoulli,
}

/// `n × D` matrix of i.i.d. entries scaled by `1/√n`, so squared norms are preserved in expectation.
pub fn random_projection(dim: usize, n: usize, dist: ProjectionDist, seed: u64) -> Result<DenseMatrix> {
    if n == 0 || n > dim {
        return Err(Error::Precondition(format!("projection size {n} must lie in 1..={dim}")));
    }
    let mut r = rng::from_seed(seed);
    let scale = 1.0 / (n as f64).sqrt();
    let data = (0..n * dim)
        .map(|_| {
            scale
                * match dist {
                    ProjectionDist::Gaussian => rng::standard_normal(&mut r),
                    ProjectionDist::Bernoulli => {
                        if r.random::<bool>() {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                }
        })
        .collect();
    DenseMatrix::new(n, dim, data)
}

/// Linear regression on PCA-compressed features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaRegression {
    pub pca: PcaModel,
    pub regression: LinearModel,
}

impl Predictor for PcaRegression {
    fn predict(&self, x: &[f64]) -> Result<f64> {
        self.regression.predict(&compress(&self.pca, x)?)
    }
}

/// Compresses the features to `n` components, then fits least squares
/// (ridge when `lambda` is given) on the compressed features.
///
/// Requires `n < m` so the regression has more points than parameters.
pub fn pca_regression(d: &LabeledDataset, n: usize, lambda: Option<f64>, center: bool) -> Result<PcaRegression> {
    d.require_labels()?;
    if n >= d.len() {
        return Err(Error::Budget {
            components: n,
            points: d.len(),
        });
    }
    let pca = fit_pca(d.features(), n, center)?;
    let rows = d
        .features()
        .row_iter()
        .map(|z| compress(&pca, z))
        .collect::<Result<Vec<_>>>()?;
    let compressed = LabeledDataset::regression(DenseMatrix::from_rows(&rows)?, d.labels().to_vec())?;
    let regression = match lambda {
        Some(l) => fit_ridge_closed(&compressed, RidgeSpec::new(l)?)?,
        None => fit_linreg_closed(&compressed)?,
    };
    Ok(PcaRegression { pca, regression })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_toy, split, ToyModelSpec};
    use crate::losses::{empirical_risk, LossKind};
    use approx::assert_relative_eq;

    fn random_points(seed: u64, m: usize, d: usize) -> DenseMatrix {
        let mut r = rng::from_seed(seed);
        // anisotropic so the spectrum is well separated
        let data = (0..m * d)
            .map(|i| rng::standard_normal(&mut r) * (1.0 + (i % d) as f64))
            .collect();
        DenseMatrix::new(m, d, data).unwrap()
    }

    #[test]
    fn full_rank_has_zero_error() {
        let x = random_points(1, 20, 5);
        let p = fit_pca(&x, 5, true).unwrap();
        assert_eq!(p.error(), 0.0);
        assert!(reconstruction_error(&p, &x).unwrap() < 1e-20);
    }

    #[test]
    fn points_on_a_line() {
        let x = DenseMatrix::from_rows(&[[1.0, 2.0], [-0.5, -1.0], [3.0, 6.0], [0.0, 0.0]]).unwrap();
        let p = fit_pca(&x, 1, true).unwrap();
        assert!(p.error() < 1e-12);
        let s5 = 5f64.sqrt();
        assert_relative_eq!(p.compression.get(0, 0), 1.0 / s5, epsilon = 1e-12);
        assert_relative_eq!(p.compression.get(0, 1), 2.0 / s5, epsilon = 1e-12);
    }

    #[test]
    fn error_identity_and_orthonormal_rows() {
        for seed in 0..10 {
            let x = random_points(seed, 20, 5);
            for center in [true, false] {
                for n in 0..=5 {
                    let p = fit_pca(&x, n, center).unwrap();
                    let direct = reconstruction_error(&p, &x).unwrap();
                    assert!((direct - p.error()).abs() < 1e-8, "n={n}: {direct} vs {}", p.error());
                    let wwt = p.compression.outer_gram();
                    for i in 0..n {
                        for j in 0..n {
                            let want = if i == j { 1.0 } else { 0.0 };
                            assert!((wwt.get(i, j) - want).abs() < 1e-9);
                        }
                    }
                }
                let p = fit_pca(&x, 2, center).unwrap();
                let q_trace: f64 = (0..5).map(|j| {
                    let c = x.col(j);
                    let mu = if center { vector::mean(&c) } else { 0.0 };
                    c.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / 20.0
                }).sum();
                assert!((p.spectrum.iter().sum::<f64>() - q_trace).abs() < 1e-8);
                for k in 0..5 {
                    assert!(p.error_for(k + 1) <= p.error_for(k));
                }
            }
        }
    }

    #[test]
    fn zero_components_cost_the_mean_square() {
        let x = random_points(2, 15, 3);
        let p = fit_pca(&x, 0, false).unwrap();
        let ms: f64 = x.row_iter().map(|r| vector::dot(r, r)).sum::<f64>() / 15.0;
        assert_relative_eq!(p.error(), ms, max_relative = 1e-10);
    }

    #[test]
    fn compress_and_reconstruct() {
        let x = random_points(3, 30, 4);
        let p = fit_pca(&x, 2, false).unwrap();
        let u0 = p.compression.row(0).to_vec();
        let z = vector::scale(&u0, -3.0);
        let c = compress(&p, &z).unwrap();
        assert_relative_eq!(c[0], -3.0, epsilon = 1e-12);
        assert!(c[1].abs() < 1e-12);
        assert!(vector::norm_inf(&vector::sub(&reconstruct(&p, &c).unwrap(), &z)) < 1e-9);

        let full = fit_pca(&x, 4, false).unwrap();
        let ortho = full.compression.row(3).to_vec();
        assert!(vector::norm(&compress(&p, &ortho).unwrap()) < 1e-12);

        let centered = fit_pca(&x, 2, true).unwrap();
        assert_eq!(reconstruct(&centered, &[0.0, 0.0]).unwrap(), centered.center.clone().unwrap());
        // residual of any reconstruction is orthogonal to the kept directions
        for z in x.row_iter() {
            let back = reconstruct(&p, &compress(&p, z).unwrap()).unwrap();
            let resid = vector::sub(z, &back);
            assert!(vector::norm_inf(&p.compression.matvec(&resid).unwrap()) < 1e-9);
        }
        assert!(matches!(compress(&p, &[1.0]), Err(Error::Shape(_))));
        assert!(matches!(fit_pca(&x, 5, true), Err(Error::Shape(_))));
    }

    #[test]
    fn projection_statistics() {
        let a = random_projection(1000, 1000, ProjectionDist::Gaussian, 4).unwrap();
        assert_eq!(a, random_projection(1000, 1000, ProjectionDist::Gaussian, 4).unwrap());
        let v: Vec<f64> = a.as_slice().iter().map(|x| x * (1000f64).sqrt()).collect();
        let mean = vector::mean(&v);
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64;
        assert!(mean.abs() < 0.01);
        assert!((var - 1.0).abs() < 0.02);
        let b = random_projection(10, 4, ProjectionDist::Bernoulli, 1).unwrap();
        assert!(b.as_slice().iter().all(|&x| (x.abs() - 0.5).abs() < 1e-15));
    }

    #[test]
    fn projection_roughly_preserves_distances() {
        let pts = random_points(5, 100, 1000);
        let a = random_projection(1000, 200, ProjectionDist::Gaussian, 6).unwrap();
        let proj: Vec<Vec<f64>> = pts.row_iter().map(|z| a.matvec(z).unwrap()).collect();
        let (mut ok, mut total) = (0, 0);
        for i in 0..100 {
            for j in i + 1..100 {
                let orig = vector::squared_distance(pts.row(i), pts.row(j)).sqrt();
                let new = vector::squared_distance(&proj[i], &proj[j]).sqrt();
                total += 1;
                if (new / orig - 1.0).abs() <= 0.3 {
                    ok += 1;
                }
            }
        }
        assert!(ok as f64 >= 0.95 * total as f64);
    }

    fn toy(n: usize, m: usize, seed: u64) -> LabeledDataset {
        generate_toy(&ToyModelSpec {
            w_true: (0..n).map(|i| 1.0 / (1.0 + i as f64)).collect(),
            noise_variance: 0.1,
            sample_count: m,
            seed,
        })
        .unwrap()
    }

    #[test]
    fn compression_rescues_short_wide_data() {
        let d = toy(50, 40, 7);
        let s = split(&d, 0.5, 1).unwrap();
        assert!(matches!(fit_linreg_closed(&s.train), Err(Error::Singular { .. })));
        let model = pca_regression(&s.train, 10, None, true).unwrap();
        assert!(empirical_risk(LossKind::Squared, &model, &s.val).unwrap().is_finite());
        assert!(matches!(pca_regression(&s.train, 20, None, true), Err(Error::Budget { .. })));
    }

    #[test]
    fn no_compression_equals_least_squares() {
        let d = toy(6, 40, 2);
        let pipe = pca_regression(&d, 6, None, false).unwrap();
        let ols = fit_linreg_closed(&d).unwrap();
        for x in d.features().row_iter() {
            assert!((pipe.predict(x).unwrap() - ols.predict(x).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn labels_along_the_first_component() {
        let x = random_points(8, 60, 4);
        // the largest-variance direction of this data is the last axis
        let y: Vec<f64> = x.row_iter().map(|r| 2.0 * r[3]).collect();
        let d = LabeledDataset::regression(x, y).unwrap();
        let s = split(&d, 0.5, 0).unwrap();
        let model = pca_regression(&s.train, 1, None, false).unwrap();
        let err = empirical_risk(LossKind::Squared, &model, &s.val).unwrap();
        let scale = vector::dot(s.val.labels(), s.val.labels()) / s.val.len() as f64;
        assert!(err < 0.2 * scale, "err {err} vs label power {scale}");
    }

    #[test]
    fn scatter_export() {
        let x = random_points(1, 5, 3);
        let p = fit_pca(&x, 2, true).unwrap();
        let mut buf = Vec::new();
        write_scatter_csv(&p, &x, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.lines().skip(1).all(|l| l.split(',').count() == 2));
    }
}
