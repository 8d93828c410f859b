use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{sample_toy, ToyModelSpec};
use crate::error::{Error, Result};
use crate::numerics::{solve_spd, vector, DenseMatrix};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimator {
    /// Least squares on the first `r` features, zero-padded to full length.
    Restricted { r: usize },
    /// Ridge regression on all features.
    Ridge { lambda: f64 },
}

/// Monte-Carlo estimates of squared bias, variance and prediction error,
/// next to their closed-form counterparts.
///
/// Standard errors (`*_se`) describe the Monte-Carlo uncertainty of the
/// matching empirical quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasVarianceResult {
    pub estimator: Estimator,
    /// Number of features the estimator may use.
    pub r: usize,
    pub lambda: f64,
    pub dim: usize,
    pub sample_count: usize,
    pub noise_variance: f64,
    pub trials: usize,
    pub seed: u64,

    pub empirical_bias_sq: f64,
    pub empirical_bias_sq_se: f64,
    pub empirical_variance: f64,
    pub empirical_variance_se: f64,
    pub empirical_pred_error: f64,
    pub empirical_pred_error_se: f64,
    /// `empirical_pred_error - (empirical_bias_sq + empirical_variance + σ²)`.
    pub decomposition_gap: f64,
    pub decomposition_gap_se: f64,

    pub analytic_bias_sq: f64,
    pub analytic_variance: f64,
    pub analytic_pred_error: f64,
    /// Restricted: variance with the omitted features counted as extra noise,
    /// `(σ² + B²) r / (m - r - 1)`. Ridge: `σ² n / (m (1+λ)²)`.
    pub alternative_variance: f64,
    /// Restricted: equals `analytic_bias_sq`. Ridge: `Σ (λ/(1+λ))² w²`.
    pub alternative_bias_sq: f64,
    pub alternative_pred_error: f64,
}

impl BiasVarianceResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

const CSV_HEADER: [&str; 17] = [
    "r",
    "lambda",
    "trials",
    "analytic_bias_sq",
    "analytic_variance",
    "analytic_pred_error",
    "alternative_bias_sq",
    "alternative_variance",
    "alternative_pred_error",
    "empirical_bias_sq",
    "empirical_bias_sq_se",
    "empirical_variance",
    "empirical_variance_se",
    "empirical_pred_error",
    "empirical_pred_error_se",
    "decomposition_gap",
    "decomposition_gap_se",
];

/// One row per result: the sweep parameter followed by analytic and empirical columns.
pub fn write_sweep_csv<W: Write>(results: &[BiasVarianceResult], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in results {
        let row = [
            r.r as f64,
            r.lambda,
            r.trials as f64,
            r.analytic_bias_sq,
            r.analytic_variance,
            r.analytic_pred_error,
            r.alternative_bias_sq,
            r.alternative_variance,
            r.alternative_pred_error,
            r.empirical_bias_sq,
            r.empirical_bias_sq_se,
            r.empirical_variance,
            r.empirical_variance_se,
            r.empirical_pred_error,
            r.empirical_pred_error_se,
            r.decomposition_gap,
            r.decomposition_gap_se,
        ];
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

struct Trial {
    w_hat: Vec<f64>,
    pred_error: f64,
}

fn fit(estimator: Estimator, x: &DenseMatrix, y: &[f64], n: usize) -> Result<Vec<f64>> {
    match estimator {
        Estimator::Restricted { r } => {
            let cols: Vec<usize> = (0..r).collect();
            let xr = x.select_cols(&cols);
            let mut w = solve_spd(&xr.gram(), &xr.tmatvec(y)?)?;
            w.resize(n, 0.0);
            Ok(w)
        }
        Estimator::Ridge { lambda } => {
            let m = x.rows() as f64;
            let a = x.gram().scaled(1.0 / m).add_diag(lambda);
            let b = vector::scale(&x.tmatvec(y)?, 1.0 / m);
            solve_spd(&a, &b)
        }
    }
}

fn run_trials(spec: &ToyModelSpec, estimator: Estimator, trials: usize) -> Result<Vec<Trial>> {
    let n = spec.dim();
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::substream(spec.seed, t as u64);
            let train = sample_toy(&spec.w_true, spec.noise_variance, spec.sample_count, &mut r)?;
            let w_hat = fit(estimator, train.features(), train.labels(), n)?;
            let test = sample_toy(&spec.w_true, spec.noise_variance, 1, &mut r)?;
            let resid = test.label(0) - vector::dot(&w_hat, test.point(0));
            Ok(Trial {
                w_hat,
                pred_error: resid * resid,
            })
        })
        .collect()
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let t = values.len() as f64;
    let mean = values.iter().sum::<f64>() / t;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (t - 1.0);
    (mean, (var / t).sqrt())
}

struct Empirical {
    bias_sq: (f64, f64),
    variance: (f64, f64),
    pred_error: (f64, f64),
    gap: (f64, f64),
}

fn summarize(trials: &[Trial], w_true: &[f64], noise_variance: f64) -> Empirical {
    let t = trials.len() as f64;
    let n = w_true.len();
    let mut mean_w = vec![0.0; n];
    for tr in trials {
        vector::axpy(1.0 / t, &tr.w_hat, &mut mean_w);
    }
    let dev: Vec<Vec<f64>> = trials.iter().map(|tr| vector::sub(&tr.w_hat, &mean_w)).collect();
    let spread: Vec<f64> = dev.iter().map(|d| vector::dot(d, d)).collect();
    let (variance, variance_se) = mean_and_se(&spread);

    let bias = vector::sub(w_true, &mean_w);
    let bias_sq = vector::dot(&bias, &bias);
    // ‖b̄‖² with b̄ the mean of T i.i.d. vectors with covariance S has
    // variance ≈ 4 bᵀSb / T + 2 tr(S²) / T² and sits tr(S) / T above ‖b‖² on
    // average; the reported error combines both (root-mean-square deviation)
    let denom = (t - 1.0).max(1.0);
    let mut s = vec![0.0; n * n];
    for d in &dev {
        for i in 0..n {
            for j in 0..n {
                s[i * n + j] += d[i] * d[j] / denom;
            }
        }
    }
    let mut bsb = 0.0;
    let mut tr_s2 = 0.0;
    let mut tr_s = 0.0;
    for i in 0..n {
        tr_s += s[i * n + i];
        for j in 0..n {
            bsb += bias[i] * s[i * n + j] * bias[j];
            tr_s2 += s[i * n + j] * s[j * n + i];
        }
    }
    let bias_se = (4.0 * bsb / t + 2.0 * tr_s2 / (t * t) + (tr_s / t).powi(2)).sqrt();

    let pred: Vec<f64> = trials.iter().map(|tr| tr.pred_error).collect();
    let pred_error = mean_and_se(&pred);
    // ‖b̄‖² + mean‖ŵ - w̄‖² = mean‖ŵ - w_true‖², so the gap is a per-trial average
    let gap_terms: Vec<f64> = trials
        .iter()
        .map(|tr| {
            let e = vector::sub(&tr.w_hat, w_true);
            tr.pred_error - vector::dot(&e, &e) - noise_variance
        })
        .collect();
    let gap = mean_and_se(&gap_terms);
    Empirical {
        bias_sq: (bias_sq, bias_se),
        variance: (variance, variance_se),
        pred_error,
        gap,
    }
}

fn check(spec: &ToyModelSpec, trials: usize) -> Result<()> {
    spec.validate()?;
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    Ok(())
}

/// Least squares restricted to the first `r` features, repeated over fresh datasets.
///
/// The closed-form variance `σ² r / (m - r - 1)` uses the inverse-Wishart
/// expectation `E[(X_rᵀX_r)⁻¹] = I / (m - r - 1)`, which only exists for `m > r + 1`.
pub fn bias_variance_experiment(spec: &ToyModelSpec, r: usize, trials: usize) -> Result<BiasVarianceResult> {
    check(spec, trials)?;
    let n = spec.dim();
    let m = spec.sample_count;
    if r == 0 || r > n {
        return Err(Error::Precondition(format!("model size r = {r} must lie in 1..={n}")));
    }
    if m <= r + 1 {
        return Err(Error::Validity(format!(
            "the variance formula needs more than r + 1 = {} training points (got {m}); \
             the inverse-Wishart expectation E[(X_rᵀX_r)⁻¹] = I/(m - r - 1) is undefined otherwise",
            r + 1
        )));
    }
    let sigma2 = spec.noise_variance;
    let bias_sq: f64 = spec.w_true[r..].iter().map(|w| w * w).sum();
    let factor = r as f64 / (m - r - 1) as f64;
    let variance = sigma2 * factor;
    let corrected = (sigma2 + bias_sq) * factor;

    let estimator = Estimator::Restricted { r };
    let emp = summarize(&run_trials(spec, estimator, trials)?, &spec.w_true, sigma2);
    Ok(BiasVarianceResult {
        estimator,
        r,
        lambda: 0.0,
        dim: n,
        sample_count: m,
        noise_variance: sigma2,
        trials,
        seed: spec.seed,
        empirical_bias_sq: emp.bias_sq.0,
        empirical_bias_sq_se: emp.bias_sq.1,
        empirical_variance: emp.variance.0,
        empirical_variance_se: emp.variance.1,
        empirical_pred_error: emp.pred_error.0,
        empirical_pred_error_se: emp.pred_error.1,
        decomposition_gap: emp.gap.0,
        decomposition_gap_se: emp.gap.1,
        analytic_bias_sq: bias_sq,
        analytic_variance: variance,
        analytic_pred_error: bias_sq + variance + sigma2,
        alternative_bias_sq: bias_sq,
        alternative_variance: corrected,
        alternative_pred_error: bias_sq + corrected + sigma2,
    })
}

/// Ridge regression on all features, repeated over fresh datasets.
///
/// The closed forms assume `(1/m)XᵀX ≈ I` (large `m`). Two readings are
/// reported: linear factors `Σ λ/(1+λ) w²` and `σ² (n/m) / (1+λ)`
/// (`analytic_*`), and the squared factors obtained by evaluating the
/// estimator directly, `Σ (λ/(1+λ))² w²` and `σ² (n/m) / (1+λ)²` plus the
/// first-order random-design term `λ²(n+1)‖w‖² / (m(1+λ)⁴)` (`alternative_*`).
pub fn ridge_bias_variance_experiment(spec: &ToyModelSpec, lambda: f64, trials: usize) -> Result<BiasVarianceResult> {
    check(spec, trials)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Precondition(format!("ridge lambda must be nonnegative, got {lambda}")));
    }
    let n = spec.dim();
    let m = spec.sample_count;
    if m <= n + 1 && lambda == 0.0 {
        return Err(Error::Validity(format!(
            "unregularized least squares needs more than n + 1 = {} training points (got {m})",
            n + 1
        )));
    }
    let sigma2 = spec.noise_variance;
    let w2: f64 = vector::dot(&spec.w_true, &spec.w_true);
    let shrink = lambda / (1.0 + lambda);
    let base_var = sigma2 * n as f64 / m as f64;
    let bias_lin = shrink * w2;
    let bias_sq = shrink * shrink * w2;
    let var_lin = base_var / (1.0 + lambda);
    // Fluctuations of (1/m)XᵀX around I move the shrunk mean too; to first
    // order they add λ²(n+1)‖w‖² / (m(1+λ)⁴), which vanishes at λ = 0.
    let design = lambda * lambda * (n + 1) as f64 * w2 / (m as f64 * (1.0 + lambda).powi(4));
    let var_sq = base_var / (1.0 + lambda).powi(2) + design;

    let estimator = Estimator::Ridge { lambda };
    let emp = summarize(&run_trials(spec, estimator, trials)?, &spec.w_true, sigma2);
    Ok(BiasVarianceResult {
        estimator,
        r: n,
        lambda,
        dim: n,
        sample_count: m,
        noise_variance: sigma2,
        trials,
        seed: spec.seed,
        empirical_bias_sq: emp.bias_sq.0,
        empirical_bias_sq_se: emp.bias_sq.1,
        empirical_variance: emp.variance.0,
        empirical_variance_se: emp.variance.1,
        empirical_pred_error: emp.pred_error.0,
        empirical_pred_error_se: emp.pred_error.1,
        decomposition_gap: emp.gap.0,
        decomposition_gap_se: emp.gap.1,
        analytic_bias_sq: bias_lin,
        analytic_variance: var_lin,
        analytic_pred_error: bias_lin + var_lin + sigma2,
        alternative_bias_sq: bias_sq,
        alternative_variance: var_sq,
        alternative_pred_error: bias_sq + var_sq + sigma2,
    })
}
