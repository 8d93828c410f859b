use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::models::LinearModel;
use crate::numerics::{cholesky, condition_number, vector, DenseMatrix};

/// Class means and the pooled covariance estimated from a binary dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianClassParams {
    pub mu_plus: Vec<f64>,
    pub mu_minus: Vec<f64>,
    /// Covariance of all points around the global mean.
    pub sigma: DenseMatrix,
    pub m_plus: usize,
    pub m_minus: usize,
}

/// Sample mean and `1/m`-normalized sample covariance of the rows of `points`.
pub fn gaussian_ml(points: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let (m, n) = points.shape();
    if m == 0 {
        return Err(Error::Size("cannot estimate a Gaussian from zero points".into()));
    }
    let mut mean = vec![0.0; n];
    for row in points.row_iter() {
        vector::axpy(1.0 / m as f64, row, &mut mean);
    }
    let mut cov = DenseMatrix::zeros(n, n);
    for row in points.row_iter() {
        let c = vector::sub(row, &mean);
        for i in 0..n {
            for j in i..n {
                let v = cov.get(i, j) + c[i] * c[j];
                cov.set(i, j, v);
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            let v = cov.get(i, j) / m as f64;
            cov.set(i, j, v);
            cov.set(j, i, v);
        }
    }
    Ok((mean, cov))
}

/// Classifier weights `Σ⁻¹(μ₊ - μ₋)`; `naive` keeps only the diagonal of `Σ`.
pub fn bayes_weights(params: &GaussianClassParams, naive: bool) -> Result<Vec<f64>> {
    let diff = vector::sub(&params.mu_plus, &params.mu_minus);
    let sigma = if naive {
        DenseMatrix::from_diag(&params.sigma.diag())
    } else {
        params.sigma.clone()
    };
    let hint = if naive {
        "a feature has zero variance"
    } else {
        "estimated covariance is not invertible; try the naive variant"
    };
    let chol = cholesky(&sigma).map_err(|e| match e {
        Error::Singular { pivot, .. } => Error::Singular {
            pivot,
            hint: hint.to_string(),
        },
        other => other,
    })?;
    if condition_number(&sigma)?.is_infinite() {
        return Err(Error::Singular {
            pivot: sigma.rows() - 1,
            hint: hint.to_string(),
        });
    }
    chol.solve(&diff)
}

/// Plug-in Gaussian classifier with a shared covariance.
pub fn fit_bayes(d: &LabeledDataset, naive: bool) -> Result<(LinearModel, GaussianClassParams)> {
    d.require_labels()?;
    d.require_binary()?;
    let plus: Vec<usize> = (0..d.len()).filter(|&i| d.label(i) > 0.0).collect();
    let minus: Vec<usize> = (0..d.len()).filter(|&i| d.label(i) < 0.0).collect();
    if plus.is_empty() || minus.is_empty() {
        return Err(Error::DegenerateLabels("both classes must be present".into()));
    }
    let (mu_plus, _) = gaussian_ml(&d.features().select_rows(&plus))?;
    let (mu_minus, _) = gaussian_ml(&d.features().select_rows(&minus))?;
    let (_, sigma) = gaussian_ml(d.features())?;
    let params = GaussianClassParams {
        mu_plus,
        mu_minus,
        sigma,
        m_plus: plus.len(),
        m_minus: minus.len(),
    };
    let w = bayes_weights(&params, naive)?;
    Ok((LinearModel::new(w), params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::{empirical_risk, LossKind};
    use crate::rng;
    use approx::assert_relative_eq;

    #[test]
    fn single_point() {
        let (mean, cov) = gaussian_ml(&DenseMatrix::from_rows(&[[1.0, 2.0]]).unwrap()).unwrap();
        assert_eq!(mean, vec![1.0, 2.0]);
        assert_eq!(cov, DenseMatrix::zeros(2, 2));
    }

    #[test]
    fn two_mirrored_points() {
        let (mean, cov) = gaussian_ml(&DenseMatrix::from_rows(&[[1.0, 0.0], [-1.0, 0.0]]).unwrap()).unwrap();
        assert_eq!(mean, vec![0.0, 0.0]);
        assert_eq!(cov, DenseMatrix::from_diag(&[1.0, 0.0]));
    }

    #[test]
    fn empty_input() {
        assert!(matches!(gaussian_ml(&DenseMatrix::zeros(0, 2)), Err(Error::Size(_))));
    }

    #[test]
    fn large_sample_estimates() {
        // z = μ + A g with AAᵀ = [[4, 1.2], [1.2, 1]]
        let mu = [1.0, -2.0];
        let a = [[2.0, 0.0], [0.6, 0.8]];
        let mut r = rng::from_seed(21);
        let m = 100_000;
        let mut rows = Vec::with_capacity(m);
        for _ in 0..m {
            let g = rng::standard_normal_vec(&mut r, 2);
            rows.push([mu[0] + a[0][0] * g[0], mu[1] + a[1][0] * g[0] + a[1][1] * g[1]]);
        }
        let (mean, cov) = gaussian_ml(&DenseMatrix::from_rows(&rows).unwrap()).unwrap();
        assert_relative_eq!(mean[0], 1.0, max_relative = 0.02);
        assert_relative_eq!(mean[1], -2.0, max_relative = 0.02);
        assert_relative_eq!(cov.get(0, 0), 4.0, max_relative = 0.02);
        assert_relative_eq!(cov.get(0, 1), 1.2, max_relative = 0.02);
        assert_relative_eq!(cov.get(1, 1), 1.0, max_relative = 0.02);
    }

    fn params(sigma: DenseMatrix) -> GaussianClassParams {
        GaussianClassParams {
            mu_plus: vec![1.0, 0.0],
            mu_minus: vec![-1.0, 0.0],
            sigma,
            m_plus: 1,
            m_minus: 1,
        }
    }

    #[test]
    fn weight_examples() {
        assert_eq!(bayes_weights(&params(DenseMatrix::identity(2)), false).unwrap(), vec![2.0, 0.0]);
        let w = bayes_weights(&params(DenseMatrix::from_diag(&[4.0, 1.0])), false).unwrap();
        assert_relative_eq!(w[0], 0.5);
        assert_relative_eq!(w[1], 0.0);
    }

    #[test]
    fn naive_ignores_correlation() {
        let s = DenseMatrix::from_rows(&[[2.0, 0.9], [0.9, 1.0]]).unwrap();
        let w = bayes_weights(&params(s), true).unwrap();
        assert_relative_eq!(w[0], 1.0);
        assert_eq!(w[1], 0.0);
    }

    #[test]
    fn too_few_points_for_full_covariance() {
        let mut r = rng::from_seed(2);
        let x = DenseMatrix::new(3, 5, rng::standard_normal_vec(&mut r, 15)).unwrap();
        let d = LabeledDataset::binary(x, vec![1.0, -1.0, 1.0]).unwrap();
        match fit_bayes(&d, false) {
            Err(Error::Singular { hint, .. }) => assert!(hint.contains("naive")),
            other => panic!("expected singular error, got {other:?}"),
        }
        assert!(fit_bayes(&d, true).is_ok());
    }

    #[test]
    fn gaussian_classes_reach_optimal_accuracy() {
        // classes N(±μ, I) with μ = (1, 0.5): optimal error Φ(-‖μ‖)
        let mu = [1.0, 0.5];
        let sample = |seed: u64, m: usize| {
            let mut r = rng::from_seed(seed);
            let mut rows = Vec::with_capacity(m);
            let mut y = Vec::with_capacity(m);
            for i in 0..m {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                let g = rng::standard_normal_vec(&mut r, 2);
                rows.push([s * mu[0] + g[0], s * mu[1] + g[1]]);
                y.push(s);
            }
            LabeledDataset::binary(DenseMatrix::from_rows(&rows).unwrap(), y).unwrap()
        };
        let (model, _) = fit_bayes(&sample(1, 10_000), false).unwrap();
        let err = empirical_risk(LossKind::ZeroOne, &model, &sample(2, 10_000)).unwrap();
        // Φ(-‖μ‖) with ‖μ‖ = √1.25
        let optimum = 0.131_776;
        assert!((err - optimum).abs() < 0.02, "error {err}");
    }
}
