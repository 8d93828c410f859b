use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::models::LinearModel;
use crate::numerics::{cholesky, condition_number, solve_spd, vector, DenseMatrix};
use crate::optimize::{run_gd, GdConfig, GdTrace, Objective};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RidgeSpec {
    pub lambda: f64,
}

impl RidgeSpec {
    pub fn new(lambda: f64) -> Result<Self> {
        let s = Self { lambda };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda >= 0.0 && self.lambda.is_finite() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "ridge lambda must be finite and nonnegative, got {}",
                self.lambda
            )))
        }
    }
}

fn require_nonempty(d: &LabeledDataset) -> Result<()> {
    d.require_labels()?;
    if d.is_empty() {
        return Err(Error::Size("cannot fit on an empty dataset".into()));
    }
    Ok(())
}

/// Solves the SPD system, reporting rank deficiency (`κ = ∞`) as a singularity.
fn solve_full_rank(a: &DenseMatrix, b: &[f64], hint: &str) -> Result<Vec<f64>> {
    let chol = cholesky(a).map_err(|e| match e {
        Error::Singular { pivot, .. } => Error::Singular {
            pivot,
            hint: hint.to_string(),
        },
        other => other,
    })?;
    if condition_number(a)?.is_infinite() {
        return Err(Error::Singular {
            pivot: a.rows() - 1,
            hint: hint.to_string(),
        });
    }
    chol.solve(b)
}

/// Ordinary least squares via the normal equations `XᵀX w = Xᵀy`.
pub fn fit_linreg_closed(d: &LabeledDataset) -> Result<LinearModel> {
    require_nonempty(d)?;
    let x = d.features();
    let w = solve_full_rank(
        &x.gram(),
        &x.tmatvec(d.labels())?,
        "XᵀX is not invertible; use ridge regression or gradient descent",
    )?;
    Ok(LinearModel::new(w))
}

/// Minimum-norm interpolant `w = Xᵀ(XXᵀ)⁻¹y` for `m ≤ n` with independent rows.
pub fn fit_linreg_min_norm(d: &LabeledDataset) -> Result<LinearModel> {
    require_nonempty(d)?;
    let x = d.features();
    if d.len() > d.dim() {
        return Err(Error::Precondition(format!(
            "minimum-norm solution needs at most as many points as features ({} > {})",
            d.len(),
            d.dim()
        )));
    }
    let c = solve_full_rank(
        &x.outer_gram(),
        d.labels(),
        "data points are linearly dependent; use ridge regression",
    )?;
    Ok(LinearModel::new(x.tmatvec(&c)?))
}

/// `w = (1/m)((1/m)XᵀX + λI)⁻¹Xᵀy`; `λ = 0` falls back to ordinary least squares.
pub fn fit_ridge_closed(d: &LabeledDataset, spec: RidgeSpec) -> Result<LinearModel> {
    spec.validate()?;
    if spec.lambda == 0.0 {
        return fit_linreg_closed(d);
    }
    require_nonempty(d)?;
    let m = d.len() as f64;
    let x = d.features();
    let a = x.gram().scaled(1.0 / m).add_diag(spec.lambda);
    let b = vector::scale(&x.tmatvec(d.labels())?, 1.0 / m);
    Ok(LinearModel::new(solve_spd(&a, &b)?))
}

pub fn fit_linreg_gd(d: &LabeledDataset, config: &GdConfig) -> Result<(LinearModel, GdTrace)> {
    require_nonempty(d)?;
    let trace = run_gd(Objective::LinReg, d, config)?;
    Ok((LinearModel::new(trace.weights.clone()), trace))
}

pub fn fit_ridge_gd(d: &LabeledDataset, spec: RidgeSpec, config: &GdConfig) -> Result<(LinearModel, GdTrace)> {
    spec.validate()?;
    require_nonempty(d)?;
    let trace = run_gd(Objective::Ridge { lambda: spec.lambda }, d, config)?;
    Ok((LinearModel::new(trace.weights.clone()), trace))
}

fn require_both_classes(d: &LabeledDataset) -> Result<()> {
    require_nonempty(d)?;
    d.require_binary()?;
    let pos = d.labels().iter().filter(|&&y| y > 0.0).count();
    if pos == 0 || pos == d.len() {
        return Err(Error::DegenerateLabels(
            "both classes must be present to fit a classifier".into(),
        ));
    }
    Ok(())
}

/// Logistic regression by gradient descent.
pub fn fit_logreg(d: &LabeledDataset, config: &GdConfig) -> Result<(LinearModel, GdTrace)> {
    require_both_classes(d)?;
    let trace = run_gd(Objective::LogReg, d, config)?;
    Ok((LinearModel::new(trace.weights.clone()), trace))
}

/// `p(y | x) = 1 / (1 + exp(-y wᵀx))`.
pub fn logistic_probability(w: &[f64], x: &[f64], y: f64) -> f64 {
    let z = y * vector::dot(w, x);
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Soft-margin SVM by subgradient descent; returns the best iterate found.
pub fn fit_svm(d: &LabeledDataset, lambda: f64, config: &GdConfig) -> Result<(LinearModel, GdTrace)> {
    require_both_classes(d)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Precondition(format!("svm lambda must be positive, got {lambda}")));
    }
    let trace = run_gd(Objective::HingeSubgradient { lambda }, d, config)?;
    Ok((LinearModel::new(trace.weights.clone()), trace))
}
