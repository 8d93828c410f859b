//! Gradient descent, SGD and subgradient descent for the ERM objectives.
//!
//! All objectives are averages over the dataset:
//!
//! - linear regression: `(1/m) Σ (y - wᵀx)²`
//! - logistic regression: `(1/m) Σ log(1 + exp(-y wᵀx))`
//! - ridge: linear regression plus `λ‖w‖²`
//! - soft-margin SVM: `(1/m) Σ max(0, 1 - y wᵀx) + λ‖w‖²`

use std::io::Write;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::losses::softplus;
use crate::numerics::{max_eigenvalue, vector};
use crate::rng::{self, Rng};

/// Objective is considered diverging once it exceeds this multiple of its initial value.
pub const DIVERGENCE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective {
    LinReg,
    LogReg,
    Ridge { lambda: f64 },
    HingeSubgradient { lambda: f64 },
}

impl Objective {
    fn validate(self, d: &LabeledDataset) -> Result<()> {
        d.require_labels()?;
        if d.is_empty() {
            return Err(Error::Size("objective over an empty dataset".into()));
        }
        match self {
            Objective::Ridge { lambda } | Objective::HingeSubgradient { lambda }
                if !(lambda >= 0.0 && lambda.is_finite()) =>
            {
                Err(Error::Precondition(format!("regularization must be nonnegative, got {lambda}")))
            }
            Objective::LogReg | Objective::HingeSubgradient { .. } => d.require_binary(),
            _ => Ok(()),
        }
    }

    fn differentiable(self) -> bool {
        !matches!(self, Objective::HingeSubgradient { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSize {
    Fixed { alpha: f64 },
    /// Derived from a bound on the Hessian's largest eigenvalue
    /// (for the SVM: `1/(2λk)`, for SGD: `1/k`).
    Auto,
    /// `α_k = scale / k`.
    Decaying { scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdConfig {
    pub step_size: StepSize,
    pub max_iters: usize,
    /// Stop once the objective changes by at most this much in one iteration.
    pub stop_tol: f64,
    /// Only used by SGD.
    pub seed: u64,
}

impl Default for GdConfig {
    fn default() -> Self {
        Self {
            step_size: StepSize::Auto,
            max_iters: 100_000,
            stop_tol: 1e-10,
            seed: 0,
        }
    }
}

impl GdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Precondition("max_iters must be at least 1".into()));
        }
        if !(self.stop_tol >= 0.0) {
            return Err(Error::Precondition(format!("stop_tol must be nonnegative, got {}", self.stop_tol)));
        }
        match self.step_size {
            StepSize::Fixed { alpha: a } | StepSize::Decaying { scale: a } if !(a > 0.0 && a.is_finite()) => {
                Err(Error::Precondition(format!("step size must be positive, got {a}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GdTrace {
    /// `objectives[k]` is the objective at the k-th iterate; entry 0 is the start.
    pub objectives: Vec<f64>,
    /// Final iterate (best iterate for subgradient descent).
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl GdTrace {
    pub fn final_objective(&self) -> f64 {
        *self.objectives.last().expect("trace always holds the initial objective")
    }

    /// Writes `iteration,objective` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["iteration", "objective"])?;
        for (k, f) in self.objectives.iter().enumerate() {
            w.write_record([k.to_string(), f.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `w - α·grad`.
pub fn gd_step(w: &[f64], grad: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Precondition(format!("step size must be positive, got {alpha}")));
    }
    if w.len() != grad.len() {
        return Err(Error::Shape(format!(
            "weights of length {} but gradient of length {}",
            w.len(),
            grad.len()
        )));
    }
    if !vector::all_finite(grad) {
        return Err(Error::Numeric("gradient has non-finite entries".into()));
    }
    let mut out = w.to_vec();
    vector::axpy(-alpha, grad, &mut out);
    Ok(out)
}

fn check_weights(w: &[f64], d: &LabeledDataset) -> Result<()> {
    if d.is_empty() {
        return Err(Error::Size("gradient over an empty dataset".into()));
    }
    if w.len() != d.dim() {
        return Err(Error::Shape(format!(
            "weights of length {} for {} features",
            w.len(),
            d.dim()
        )));
    }
    Ok(())
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `-(2/m) Σ (y - wᵀx) x`.
pub fn linreg_gradient(w: &[f64], d: &LabeledDataset) -> Result<Vec<f64>> {
    check_weights(w, d)?;
    d.require_labels()?;
    let pred = d.features().matvec(w)?;
    let scale = -2.0 / d.len() as f64;
    let coeffs: Vec<f64> = d.labels().iter().zip(&pred).map(|(y, p)| scale * (y - p)).collect();
    d.features().tmatvec(&coeffs)
}

/// `(1/m) Σ -y x / (1 + exp(y wᵀx))`.
pub fn logreg_gradient(w: &[f64], d: &LabeledDataset) -> Result<Vec<f64>> {
    check_weights(w, d)?;
    d.require_binary()?;
    let pred = d.features().matvec(w)?;
    let m = d.len() as f64;
    let coeffs: Vec<f64> = d
        .labels()
        .iter()
        .zip(&pred)
        .map(|(&y, &h)| -y * sigmoid(-y * h) / m)
        .collect();
    d.features().tmatvec(&coeffs)
}

/// Linear-regression gradient plus `2λw`.
pub fn ridge_gradient(w: &[f64], d: &LabeledDataset, lambda: f64) -> Result<Vec<f64>> {
    let mut g = linreg_gradient(w, d)?;
    vector::axpy(2.0 * lambda, w, &mut g);
    Ok(g)
}

/// Subgradient of the soft-margin objective; at margin exactly 1 the data term contributes 0.
pub fn hinge_subgradient(w: &[f64], d: &LabeledDataset, lambda: f64) -> Result<Vec<f64>> {
    check_weights(w, d)?;
    d.require_binary()?;
    let pred = d.features().matvec(w)?;
    let m = d.len() as f64;
    let coeffs: Vec<f64> = d
        .labels()
        .iter()
        .zip(&pred)
        .map(|(&y, &h)| if y * h < 1.0 { -y / m } else { 0.0 })
        .collect();
    let mut g = d.features().tmatvec(&coeffs)?;
    vector::axpy(2.0 * lambda, w, &mut g);
    Ok(g)
}

/// Diagonal entries `σ(wᵀx)(1 - σ(wᵀx))` of the logistic-regression Hessian weighting.
pub fn logreg_hessian_weights(w: &[f64], d: &LabeledDataset) -> Result<Vec<f64>> {
    check_weights(w, d)?;
    let pred = d.features().matvec(w)?;
    Ok(pred
        .iter()
        .map(|&h| {
            let p = sigmoid(h);
            p * (1.0 - p)
        })
        .collect())
}

pub fn objective_value(obj: Objective, w: &[f64], d: &LabeledDataset) -> Result<f64> {
    check_weights(w, d)?;
    obj.validate(d)?;
    let pred = d.features().matvec(w)?;
    let m = d.len() as f64;
    let data_term: f64 = match obj {
        Objective::LinReg | Objective::Ridge { .. } => {
            d.labels().iter().zip(&pred).map(|(y, h)| (y - h) * (y - h)).sum()
        }
        Objective::LogReg => d.labels().iter().zip(&pred).map(|(y, h)| softplus(-y * h)).sum(),
        Objective::HingeSubgradient { .. } => {
            d.labels().iter().zip(&pred).map(|(y, h)| (1.0 - y * h).max(0.0)).sum()
        }
    };
    let reg = match obj {
        Objective::Ridge { lambda } | Objective::HingeSubgradient { lambda } => lambda * vector::dot(w, w),
        _ => 0.0,
    };
    Ok(data_term / m + reg)
}

pub fn gradient(obj: Objective, w: &[f64], d: &LabeledDataset) -> Result<Vec<f64>> {
    match obj {
        Objective::LinReg => linreg_gradient(w, d),
        Objective::LogReg => logreg_gradient(w, d),
        Objective::Ridge { lambda } => ridge_gradient(w, d, lambda),
        Objective::HingeSubgradient { lambda } => hinge_subgradient(w, d, lambda),
    }
}

/// Gradient of the loss at the single data point `i` (plus the regularizer).
pub fn sample_gradient(obj: Objective, w: &[f64], d: &LabeledDataset, i: usize) -> Result<Vec<f64>> {
    check_weights(w, d)?;
    if i >= d.len() {
        return Err(Error::Shape(format!("data point {i} out of range for {} points", d.len())));
    }
    let x = d.point(i);
    let y = d.label(i);
    let h = vector::dot(w, x);
    let (coeff, lambda) = match obj {
        Objective::LinReg => (-2.0 * (y - h), 0.0),
        Objective::Ridge { lambda } => (-2.0 * (y - h), lambda),
        Objective::LogReg => (-y * sigmoid(-y * h), 0.0),
        Objective::HingeSubgradient { lambda } => (if y * h < 1.0 { -y } else { 0.0 }, lambda),
    };
    let mut g = vector::scale(x, coeff);
    vector::axpy(2.0 * lambda, w, &mut g);
    Ok(g)
}

/// Largest eigenvalue of `(1/m) XᵀX`.
fn scaled_gram_lambda_max(d: &LabeledDataset) -> Result<f64> {
    if d.is_empty() {
        return Err(Error::Size("step size for an empty dataset".into()));
    }
    let gram = d.features().gram().scaled(1.0 / d.len() as f64);
    let l = max_eigenvalue(&gram, 1e-12)?;
    if !(l > 0.0) {
        return Err(Error::Domain("all features are zero; no step size can be derived".into()));
    }
    Ok(l)
}

/// Step size `1/L` where `L` bounds the Hessian's largest eigenvalue.
///
/// The linear-regression objective has Hessian `(2/m) XᵀX`, ridge adds `2λI`,
/// and the logistic Hessian `(1/m) XᵀDX` is bounded using `D ≤ I/4`.
pub fn auto_step_size(obj: Objective, d: &LabeledDataset) -> Result<f64> {
    let l = scaled_gram_lambda_max(d)?;
    match obj {
        Objective::LinReg => Ok(1.0 / (2.0 * l)),
        Objective::Ridge { lambda } => Ok(1.0 / (2.0 * (l + lambda))),
        Objective::LogReg => Ok(1.0 / (l / 4.0)),
        Objective::HingeSubgradient { .. } => Err(Error::Precondition(
            "the hinge objective is not smooth; use a decaying step size".into(),
        )),
    }
}

/// Runs (sub)gradient descent from `w = 0`.
pub fn run_gd(obj: Objective, d: &LabeledDataset, config: &GdConfig) -> Result<GdTrace> {
    run_gd_from(obj, d, config, vec![0.0; d.dim()])
}

pub fn run_gd_from(obj: Objective, d: &LabeledDataset, config: &GdConfig, w0: Vec<f64>) -> Result<GdTrace> {
    config.validate()?;
    obj.validate(d)?;
    check_weights(&w0, d)?;
    let alpha_k: Box<dyn Fn(usize) -> f64> = match (config.step_size, obj) {
        (StepSize::Fixed { alpha }, _) => Box::new(move |_| alpha),
        (StepSize::Decaying { scale }, _) => Box::new(move |k| scale / k as f64),
        (StepSize::Auto, Objective::HingeSubgradient { lambda }) => {
            if lambda <= 0.0 {
                return Err(Error::Precondition(
                    "automatic subgradient steps need a positive regularization".into(),
                ));
            }
            let scale = 1.0 / (2.0 * lambda);
            Box::new(move |k| scale / k as f64)
        }
        (StepSize::Auto, _) => {
            let alpha = auto_step_size(obj, d)?;
            Box::new(move |_| alpha)
        }
    };

    let mut w = w0;
    let f0 = objective_value(obj, &w, d)?;
    let mut objectives = vec![f0];
    let mut best = (f0, w.clone());
    let mut converged = false;
    let mut iterations = 0;

    for k in 1..=config.max_iters {
        let g = gradient(obj, &w, d)?;
        w = gd_step(&w, &g, alpha_k(k))?;
        let f = objective_value(obj, &w, d)?;
        iterations = k;
        objectives.push(f);
        if !f.is_finite() || (f > DIVERGENCE_FACTOR * f0 && obj.differentiable()) {
            return Err(Error::Divergence {
                iteration: k,
                objective: f,
                initial: f0,
            });
        }
        if obj.differentiable() {
            let prev = objectives[objectives.len() - 2];
            if (prev - f).abs() <= config.stop_tol {
                converged = true;
                break;
            }
        } else if f < best.0 {
            best = (f, w.clone());
        }
    }

    let weights = if obj.differentiable() { w } else { best.1 };
    Ok(GdTrace {
        objectives,
        weights,
        iterations,
        converged,
    })
}

/// One SGD update `w - α_k ∇f_î(w)` with `î` drawn uniformly and `α_k = 1/k`.
pub fn sgd_step(obj: Objective, w: &[f64], d: &LabeledDataset, k: usize, rng: &mut Rng) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::Precondition("SGD iteration counter starts at 1".into()));
    }
    sgd_step_with(obj, w, d, 1.0 / k as f64, rng)
}

/// SGD update with an explicit step size.
pub fn sgd_step_with(obj: Objective, w: &[f64], d: &LabeledDataset, alpha: f64, rng: &mut Rng) -> Result<Vec<f64>> {
    check_weights(w, d)?;
    let i = rng.random_range(0..d.len());
    let g = sample_gradient(obj, w, d, i)?;
    gd_step(w, &g, alpha)
}

/// Runs `max_iters` SGD steps from `w = 0` using the config's seed.
///
/// `Auto` means `α_k = 1/k`. The objective is recorded after every step;
/// there is no early stopping since single-sample updates are noisy.
pub fn run_sgd(obj: Objective, d: &LabeledDataset, config: &GdConfig) -> Result<GdTrace> {
    config.validate()?;
    obj.validate(d)?;
    let mut rng = rng::from_seed(config.seed);
    let mut w = vec![0.0; d.dim()];
    let mut objectives = vec![objective_value(obj, &w, d)?];
    for k in 1..=config.max_iters {
        let alpha = match config.step_size {
            StepSize::Fixed { alpha } => alpha,
            StepSize::Decaying { scale } => scale / k as f64,
            StepSize::Auto => 1.0 / k as f64,
        };
        w = sgd_step_with(obj, &w, d, alpha, &mut rng)?;
        let f = objective_value(obj, &w, d)?;
        if !f.is_finite() {
            return Err(Error::Divergence {
                iteration: k,
                objective: f,
                initial: objectives[0],
            });
        }
        objectives.push(f);
    }
    Ok(GdTrace {
        objectives,
        weights: w,
        iterations: config.max_iters,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{solve_spd, DenseMatrix};
    use approx::assert_relative_eq;

    fn random_regression(seed: u64, m: usize, n: usize) -> LabeledDataset {
        let mut r = rng::from_seed(seed);
        let data = rng::standard_normal_vec(&mut r, m * n);
        let y = rng::standard_normal_vec(&mut r, m);
        LabeledDataset::regression(DenseMatrix::new(m, n, data).unwrap(), y).unwrap()
    }

    fn random_binary(seed: u64, m: usize, n: usize) -> LabeledDataset {
        let mut r = rng::from_seed(seed);
        let data = rng::standard_normal_vec(&mut r, m * n);
        let y = (0..m).map(|_| if r.random::<bool>() { 1.0 } else { -1.0 }).collect();
        LabeledDataset::binary(DenseMatrix::new(m, n, data).unwrap(), y).unwrap()
    }

    fn finite_difference(obj: Objective, w: &[f64], d: &LabeledDataset) -> Vec<f64> {
        let h = 1e-6;
        (0..w.len())
            .map(|j| {
                let mut a = w.to_vec();
                let mut b = w.to_vec();
                a[j] += h;
                b[j] -= h;
                (objective_value(obj, &a, d).unwrap() - objective_value(obj, &b, d).unwrap()) / (2.0 * h)
            })
            .collect()
    }

    fn rel_err(a: &[f64], b: &[f64]) -> f64 {
        vector::norm(&vector::sub(a, b)) / vector::norm(b).max(1e-8)
    }

    #[test]
    fn gd_step_examples() {
        assert_eq!(gd_step(&[4.0], &[8.0], 0.25).unwrap(), vec![2.0]);
        assert_eq!(gd_step(&[4.0, 1.0], &[0.0, 0.0], 0.5).unwrap(), vec![4.0, 1.0]);
        assert!(matches!(gd_step(&[4.0], &[8.0], 0.0), Err(Error::Precondition(_))));
        assert!(matches!(gd_step(&[4.0], &[f64::NAN], 0.1), Err(Error::Numeric(_))));
    }

    #[test]
    fn linreg_gradient_single_point() {
        let d = LabeledDataset::regression(DenseMatrix::from_rows(&[[1.0]]).unwrap(), vec![1.0]).unwrap();
        assert_eq!(linreg_gradient(&[0.0], &d).unwrap(), vec![-2.0]);
    }

    #[test]
    fn linreg_gradient_vanishes_at_normal_equations() {
        let d = random_regression(3, 40, 4);
        let x = d.features();
        let w = solve_spd(&x.gram(), &x.tmatvec(d.labels()).unwrap()).unwrap();
        assert!(vector::norm(&linreg_gradient(&w, &d).unwrap()) <= 1e-8);
    }

    #[test]
    fn gradients_match_finite_differences() {
        for seed in 0..100u64 {
            let mut r = rng::from_seed(1000 + seed);
            let w = rng::standard_normal_vec(&mut r, 3);
            let reg = random_regression(seed, 20, 3);
            let bin = random_binary(seed, 20, 3);
            for (obj, d) in [
                (Objective::LinReg, &reg),
                (Objective::Ridge { lambda: 0.7 }, &reg),
                (Objective::LogReg, &bin),
            ] {
                let g = gradient(obj, &w, d).unwrap();
                let fd = finite_difference(obj, &w, d);
                assert!(rel_err(&g, &fd) < 1e-5, "{obj:?} seed {seed}: {g:?} vs {fd:?}");
            }
        }
    }

    #[test]
    fn logreg_gradient_at_zero() {
        let d = random_binary(5, 15, 3);
        let g = logreg_gradient(&[0.0; 3], &d).unwrap();
        let expected: Vec<f64> = d
            .features()
            .tmatvec(d.labels())
            .unwrap()
            .iter()
            .map(|v| -v / (2.0 * d.len() as f64))
            .collect();
        assert!(rel_err(&g, &expected) < 1e-14);
    }

    #[test]
    fn logreg_gradient_shrinks_when_scaling_separating_weights() {
        let x = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0], [-1.0, -2.0], [-2.0, -0.5]]).unwrap();
        let d = LabeledDataset::binary(x, vec![1.0, 1.0, -1.0, -1.0]).unwrap();
        let w = [1.0, 1.0];
        let g1 = vector::norm(&logreg_gradient(&w, &d).unwrap());
        let g10 = vector::norm(&logreg_gradient(&vector::scale(&w, 10.0), &d).unwrap());
        assert!(g10 < g1);
    }

    #[test]
    fn logreg_hessian_weights_within_quarter() {
        for seed in 0..20 {
            let d = random_binary(seed, 30, 3);
            let mut r = rng::from_seed(seed + 99);
            let w = vector::scale(&rng::standard_normal_vec(&mut r, 3), 5.0);
            for v in logreg_hessian_weights(&w, &d).unwrap() {
                assert!((0.0..=0.25).contains(&v));
            }
        }
    }

    fn with_gram(diag: &[f64]) -> LabeledDataset {
        // rows sqrt(m d_j) e_j with m = n give (1/m) XᵀX = diag(d)
        let n = diag.len();
        let mut x = DenseMatrix::zeros(n, n);
        for (j, &v) in diag.iter().enumerate() {
            x.set(j, j, (n as f64 * v).sqrt());
        }
        LabeledDataset::regression(x, vec![1.0; n]).unwrap()
    }

    #[test]
    fn auto_step_examples() {
        let d = with_gram(&[4.0, 1.0]);
        assert_relative_eq!(auto_step_size(Objective::LinReg, &d).unwrap(), 0.125, max_relative = 1e-9);
        assert_relative_eq!(
            auto_step_size(Objective::Ridge { lambda: 1.0 }, &d).unwrap(),
            0.1,
            max_relative = 1e-9
        );
        let bin = LabeledDataset::binary(d.features().clone(), vec![1.0, -1.0]).unwrap();
        assert_relative_eq!(auto_step_size(Objective::LogReg, &bin).unwrap(), 1.0, max_relative = 1e-9);
        let id = with_gram(&[1.0, 1.0, 1.0]);
        assert_relative_eq!(auto_step_size(Objective::LinReg, &id).unwrap(), 0.5, max_relative = 1e-9);
    }

    #[test]
    fn auto_step_rejects_zero_features() {
        let d = LabeledDataset::regression(DenseMatrix::zeros(3, 2), vec![1.0; 3]).unwrap();
        assert!(matches!(auto_step_size(Objective::LinReg, &d), Err(Error::Domain(_))));
    }

    #[test]
    fn unit_norm_features_allow_half_step() {
        for seed in 0..10 {
            let d = random_regression(seed, 25, 4);
            let rows: Vec<Vec<f64>> = d
                .features()
                .row_iter()
                .map(|r| vector::scale(r, 1.0 / vector::norm(r)))
                .collect();
            let d = d.with_features(DenseMatrix::from_rows(&rows).unwrap()).unwrap();
            assert!(auto_step_size(Objective::LinReg, &d).unwrap() >= 0.5 - 1e-12);
        }
    }

    #[test]
    fn gd_reaches_normal_equations() {
        let d = random_regression(11, 60, 3);
        let x = d.features();
        let w_star = solve_spd(&x.gram(), &x.tmatvec(d.labels()).unwrap()).unwrap();
        let cfg = GdConfig {
            stop_tol: 0.0,
            ..GdConfig::default()
        };
        let trace = run_gd(Objective::LinReg, &d, &cfg).unwrap();
        assert!(trace.converged);
        assert!(vector::norm_inf(&vector::sub(&trace.weights, &w_star)) < 1e-6);
        for pair in trace.objectives.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-15);
        }
    }

    #[test]
    fn logreg_descent_is_monotone() {
        let d = random_binary(8, 50, 3);
        let cfg = GdConfig {
            max_iters: 2000,
            ..GdConfig::default()
        };
        let trace = run_gd(Objective::LogReg, &d, &cfg).unwrap();
        for pair in trace.objectives.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-15);
        }
    }

    #[test]
    fn oversized_step_diverges() {
        let d = with_gram(&[4.0, 1.0]);
        let alpha = 100.0 * auto_step_size(Objective::LinReg, &d).unwrap();
        let cfg = GdConfig {
            step_size: StepSize::Fixed { alpha },
            ..GdConfig::default()
        };
        let err = run_gd(Objective::LinReg, &d, &cfg).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
        assert!(err.to_string().contains("smaller step"));
    }

    #[test]
    fn ridge_iterations_fall_with_lambda() {
        // κ((1/m)XᵀX) = 100
        let d = with_gram(&[100.0, 1.0]);
        let cfg = GdConfig {
            stop_tol: 1e-12,
            ..GdConfig::default()
        };
        let iters: Vec<usize> = [0.0, 1.0, 10.0, 100.0]
            .iter()
            .map(|&lambda| run_gd(Objective::Ridge { lambda }, &d, &cfg).unwrap().iterations)
            .collect();
        for pair in iters.windows(2) {
            assert!(pair[1] <= pair[0], "{iters:?}");
        }
        assert!(iters[3] < iters[0]);
    }

    #[test]
    fn hinge_subgradient_examples() {
        let x = DenseMatrix::from_rows(&[[2.0, 0.0], [-2.0, 0.0]]).unwrap();
        let d = LabeledDataset::binary(x, vec![1.0, -1.0]).unwrap();
        // margins 2 and 2
        let g = hinge_subgradient(&[1.0, 0.5], &d, 0.3).unwrap();
        assert_relative_eq!(g[0], 0.6);
        assert_relative_eq!(g[1], 0.3);
        let g0 = hinge_subgradient(&[0.0, 0.0], &d, 0.0).unwrap();
        assert_eq!(g0, vec![-2.0, 0.0]);
        // margin exactly 1 contributes nothing
        let gk = hinge_subgradient(&[0.5, 0.0], &d, 0.0).unwrap();
        assert_eq!(gk, vec![0.0, 0.0]);
    }

    #[test]
    fn subgradient_descent_decreases_objective() {
        let x = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.5], [-1.0, -1.0], [-2.0, -0.5]]).unwrap();
        let d = LabeledDataset::binary(x, vec![1.0, 1.0, -1.0, -1.0]).unwrap();
        let obj = Objective::HingeSubgradient { lambda: 0.01 };
        let cfg = GdConfig {
            max_iters: 100,
            ..GdConfig::default()
        };
        let trace = run_gd(obj, &d, &cfg).unwrap();
        assert_eq!(trace.iterations, 100);
        let best = objective_value(obj, &trace.weights, &d).unwrap();
        assert!(best < trace.objectives[0]);
        assert!(trace.objectives.iter().all(|&f| f >= best));
    }

    #[test]
    fn sgd_with_one_point_equals_gd() {
        let d = random_regression(2, 1, 3);
        let w = [0.3, -0.2, 0.1];
        let mut r = rng::from_seed(0);
        let s = sgd_step_with(Objective::LinReg, &w, &d, 0.1, &mut r).unwrap();
        let g = gd_step(&w, &linreg_gradient(&w, &d).unwrap(), 0.1).unwrap();
        assert!(rel_err(&s, &g) < 1e-15);
        let s1 = sgd_step(Objective::LinReg, &w, &d, 1, &mut r).unwrap();
        let g1 = gd_step(&w, &linreg_gradient(&w, &d).unwrap(), 1.0).unwrap();
        assert!(rel_err(&s1, &g1) < 1e-15);
    }

    #[test]
    fn sample_gradients_average_to_full_gradient() {
        let d = random_regression(4, 30, 3);
        let w = [0.5, 1.0, -0.5];
        for obj in [Objective::LinReg, Objective::Ridge { lambda: 0.2 }] {
            let mut avg = vec![0.0; 3];
            for i in 0..d.len() {
                vector::axpy(1.0 / d.len() as f64, &sample_gradient(obj, &w, &d, i).unwrap(), &mut avg);
            }
            assert!(rel_err(&avg, &gradient(obj, &w, &d).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn stochastic_gradient_is_unbiased() {
        let d = random_regression(6, 50, 3);
        let w = [0.5, 1.0, -0.5];
        let full = linreg_gradient(&w, &d).unwrap();
        let mut r = rng::from_seed(77);
        let n = 100_000;
        let mut avg = vec![0.0; 3];
        for _ in 0..n {
            let i = r.random_range(0..d.len());
            vector::axpy(1.0 / n as f64, &sample_gradient(Objective::LinReg, &w, &d, i).unwrap(), &mut avg);
        }
        assert!(rel_err(&avg, &full) < 0.01, "{avg:?} vs {full:?}");
    }

    #[test]
    fn sgd_is_seeded_and_descends() {
        let d = random_regression(9, 40, 2);
        let cfg = GdConfig {
            max_iters: 500,
            seed: 5,
            ..GdConfig::default()
        };
        let a = run_sgd(Objective::LinReg, &d, &cfg).unwrap();
        let b = run_sgd(Objective::LinReg, &d, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.final_objective() < a.objectives[0]);
    }

    #[test]
    fn trace_csv() {
        let t = GdTrace {
            objectives: vec![2.0, 1.0],
            weights: vec![0.0],
            iterations: 1,
            converged: true,
        };
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "iteration,objective\n0,2\n1,1\n");
    }

    #[test]
    fn invalid_config() {
        let d = random_regression(1, 5, 2);
        let bad = GdConfig {
            max_iters: 0,
            ..GdConfig::default()
        };
        assert!(matches!(run_gd(Objective::LinReg, &d, &bad), Err(Error::Precondition(_))));
    }
}
