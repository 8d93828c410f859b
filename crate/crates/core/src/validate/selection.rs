use serde::{Deserialize, Serialize};

use crate::data::{split, LabeledDataset, SplitPair};
use crate::error::{Error, Result};
use crate::learners::{fit_bayes, fit_linreg_closed, fit_logreg, fit_ridge_closed, fit_svm, grow_tree, RidgeSpec};
use crate::losses::{empirical_risk, LossKind};
use crate::models::{FeatureMap, KnnMode, KnnModel, LinearModel, Model, Predictor};
use crate::numerics::DenseMatrix;
use crate::optimize::GdConfig;

/// Training and validation risk of a model fitted on `split.train`.
pub fn train_val_errors<P: Predictor + ?Sized>(model: &P, split: &SplitPair, loss: LossKind) -> Result<(f64, f64)> {
    if split.train.is_empty() || split.val.is_empty() {
        return Err(Error::Size("both partitions must be nonempty".into()));
    }
    Ok((empirical_risk(loss, model, &split.train)?, empirical_risk(loss, model, &split.val)?))
}

/// A hypothesis space together with the learner that searches it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HypothesisSpace {
    LinReg,
    Ridge { lambda: f64 },
    /// Polynomials of a scalar feature, fitted by least squares (ridge when `lambda > 0`).
    Polynomial { degree: usize, lambda: f64 },
    /// Gaussian basis functions of a scalar feature.
    GaussianBasis { means: Vec<f64>, variance: f64, lambda: f64 },
    LogReg,
    Svm { lambda: f64 },
    Bayes { naive: bool },
    Tree { max_depth: usize },
    Knn { k: usize, mode: KnnMode },
}

impl HypothesisSpace {
    pub fn id(&self) -> String {
        match self {
            HypothesisSpace::LinReg => "linreg".into(),
            HypothesisSpace::Ridge { lambda } => format!("ridge(lambda={lambda})"),
            HypothesisSpace::Polynomial { degree, lambda } if *lambda == 0.0 => format!("poly(degree={degree})"),
            HypothesisSpace::Polynomial { degree, lambda } => format!("poly(degree={degree},lambda={lambda})"),
            HypothesisSpace::GaussianBasis { means, variance, .. } => {
                format!("gauss(basis={},variance={variance})", means.len())
            }
            HypothesisSpace::LogReg => "logreg".into(),
            HypothesisSpace::Svm { lambda } => format!("svm(lambda={lambda})"),
            HypothesisSpace::Bayes { naive: false } => "bayes".into(),
            HypothesisSpace::Bayes { naive: true } => "naive-bayes".into(),
            HypothesisSpace::Tree { max_depth } => format!("tree(depth={max_depth})"),
            HypothesisSpace::Knn { k, .. } => format!("knn(k={k})"),
        }
    }

    /// Runs the learner on `train`; `gd` configures the iterative learners.
    pub fn fit(&self, train: &LabeledDataset, gd: &GdConfig) -> Result<Model> {
        let least_squares = |d: &LabeledDataset, lambda: f64| -> Result<Vec<f64>> {
            Ok(if lambda > 0.0 {
                fit_ridge_closed(d, RidgeSpec::new(lambda)?)?.weights
            } else {
                fit_linreg_closed(d)?.weights
            })
        };
        Ok(match self {
            HypothesisSpace::LinReg => Model::Linear(fit_linreg_closed(train)?),
            HypothesisSpace::Ridge { lambda } => Model::Linear(fit_ridge_closed(train, RidgeSpec::new(*lambda)?)?),
            HypothesisSpace::Polynomial { degree, lambda } => {
                let map = FeatureMap::Polynomial { max_degree: *degree };
                let expanded = expand(train, &map)?;
                Model::Linear(LinearModel::with_feature_map(least_squares(&expanded, *lambda)?, map)?)
            }
            HypothesisSpace::GaussianBasis { means, variance, lambda } => {
                let map = FeatureMap::Gaussian {
                    means: means.clone(),
                    variance: *variance,
                };
                map.validate()?;
                let expanded = expand(train, &map)?;
                Model::Linear(LinearModel::with_feature_map(least_squares(&expanded, *lambda)?, map)?)
            }
            HypothesisSpace::LogReg => Model::Linear(fit_logreg(train, gd)?.0),
            HypothesisSpace::Svm { lambda } => Model::Linear(fit_svm(train, *lambda, gd)?.0),
            HypothesisSpace::Bayes { naive } => Model::Linear(fit_bayes(train, *naive)?.0),
            HypothesisSpace::Tree { max_depth } => Model::Tree(grow_tree(train, *max_depth, None)?),
            HypothesisSpace::Knn { k, mode } => Model::Knn(KnnModel::new(train, *k, *mode)?),
        })
    }
}

fn expand(d: &LabeledDataset, map: &FeatureMap) -> Result<LabeledDataset> {
    let rows = d
        .features()
        .row_iter()
        .map(|x| map.features(x))
        .collect::<Result<Vec<_>>>()?;
    d.with_features(DenseMatrix::from_rows(&rows)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateResult {
    pub id: String,
    pub space: HypothesisSpace,
    pub train_error: Option<f64>,
    pub val_error: Option<f64>,
    /// Why fitting or evaluation failed; such candidates are never chosen.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSelectionReport {
    pub candidates: Vec<CandidateResult>,
    /// Index of the candidate with the smallest validation error (first on ties).
    pub chosen: usize,
    pub loss: LossKind,
}

impl ModelSelectionReport {
    pub fn chosen(&self) -> &CandidateResult {
        &self.candidates[self.chosen]
    }
}

pub fn select_model_on_split(
    candidates: &[HypothesisSpace],
    split: &SplitPair,
    loss: LossKind,
    gd: &GdConfig,
) -> Result<ModelSelectionReport> {
    if candidates.is_empty() {
        return Err(Error::Precondition("model selection needs at least one candidate".into()));
    }
    let results: Vec<CandidateResult> = candidates
        .iter()
        .map(|space| {
            let outcome = space
                .fit(&split.train, gd)
                .and_then(|model| train_val_errors(&model, split, loss));
            let (train_error, val_error, failure) = match outcome {
                Ok((t, v)) if v.is_finite() => (Some(t), Some(v), None),
                Ok((t, v)) => (Some(t), Some(v), Some("validation error is not finite".into())),
                Err(e) => (None, None, Some(e.to_string())),
            };
            CandidateResult {
                id: space.id(),
                space: space.clone(),
                train_error,
                val_error,
                failure,
            }
        })
        .collect();
    let mut chosen: Option<(usize, f64)> = None;
    for (i, r) in results.iter().enumerate() {
        if let (None, Some(v)) = (&r.failure, r.val_error) {
            if chosen.is_none_or(|(_, best)| v < best) {
                chosen = Some((i, v));
            }
        }
    }
    let Some((chosen, _)) = chosen else {
        let reasons: Vec<String> = results
            .iter()
            .map(|r| format!("{}: {}", r.id, r.failure.as_deref().unwrap_or("?")))
            .collect();
        return Err(Error::Validity(format!("no candidate could be fitted ({})", reasons.join("; "))));
    };
    Ok(ModelSelectionReport {
        candidates: results,
        chosen,
        loss,
    })
}

/// Splits `d`, fits each candidate on the training part and picks the smallest validation error.
pub fn select_model(
    candidates: &[HypothesisSpace],
    d: &LabeledDataset,
    train_fraction: f64,
    seed: u64,
    loss: LossKind,
) -> Result<ModelSelectionReport> {
    if candidates.is_empty() {
        return Err(Error::Precondition("model selection needs at least one candidate".into()));
    }
    let s = split(d, train_fraction, seed)?;
    select_model_on_split(candidates, &s, loss, &GdConfig::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnosis {
    Satisfactory,
    Overfit,
    SolverIssue,
    /// None of the rules apply, e.g. both errors far above the target.
    Inconclusive,
}

const RATIO: f64 = 5.0;
const SLACK: f64 = 1.5;

/// Compares training and validation errors against a target level `e0`.
///
/// A training error far above the validation error points at the solver;
/// a validation error far above an on-target training error signals
/// overfitting; both within a factor 1.5 of the target is satisfactory.
pub fn diagnose(train_error: f64, val_error: f64, e0: f64) -> Result<Diagnosis> {
    for (name, v) in [("train_error", train_error), ("val_error", val_error), ("target", e0)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::Precondition(format!("{name} must be finite and nonnegative, got {v}")));
        }
    }
    Ok(if train_error > 0.0 && train_error >= RATIO * val_error {
        Diagnosis::SolverIssue
    } else if val_error > 0.0 && val_error >= RATIO * train_error && train_error <= SLACK * e0 {
        Diagnosis::Overfit
    } else if train_error <= SLACK * e0 && val_error <= SLACK * e0 {
        Diagnosis::Satisfactory
    } else {
        Diagnosis::Inconclusive
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_toy, ToyModelSpec};
    use crate::learners::fit_linreg_min_norm;

    fn quadratic(m: usize) -> LabeledDataset {
        let rows: Vec<[f64; 1]> = (0..m).map(|i| [-1.0 + 2.0 * i as f64 / (m - 1) as f64]).collect();
        let y = rows.iter().map(|r| 1.0 - 2.0 * r[0] + 3.0 * r[0] * r[0]).collect();
        LabeledDataset::regression(DenseMatrix::from_rows(&rows).unwrap(), y).unwrap()
    }

    #[test]
    fn diagnosis_examples() {
        assert_eq!(diagnose(1.0, 1.1, 1.0).unwrap(), Diagnosis::Satisfactory);
        assert_eq!(diagnose(0.1, 5.0, 0.1).unwrap(), Diagnosis::Overfit);
        assert_eq!(diagnose(5.0, 0.5, 1.0).unwrap(), Diagnosis::SolverIssue);
        assert_eq!(diagnose(10.0, 12.0, 1.0).unwrap(), Diagnosis::Inconclusive);
        assert!(diagnose(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn polynomial_degree_selection() {
        let d = quadratic(40);
        let candidates: Vec<HypothesisSpace> = (0..=5)
            .map(|degree| HypothesisSpace::Polynomial { degree, lambda: 0.0 })
            .collect();
        let report = select_model(&candidates, &d, 0.5, 4, LossKind::Squared).unwrap();
        let chosen = report.chosen();
        assert!(matches!(chosen.space, HypothesisSpace::Polynomial { degree, .. } if degree >= 2));
        let v: Vec<f64> = report.candidates.iter().map(|c| c.val_error.unwrap()).collect();
        assert!(chosen.val_error.unwrap() < 1e-15);
        assert!(v[0] > v[2] && v[1] > v[2]);
        for c in &report.candidates {
            assert!(chosen.val_error.unwrap() <= c.val_error.unwrap());
        }
    }

    #[test]
    fn single_and_duplicate_candidates() {
        let d = quadratic(20);
        let one = select_model(&[HypothesisSpace::LinReg], &d, 0.5, 0, LossKind::Squared).unwrap();
        assert_eq!(one.chosen, 0);
        let two = select_model(
            &[HypothesisSpace::Ridge { lambda: 0.1 }, HypothesisSpace::Ridge { lambda: 0.1 }],
            &d,
            0.5,
            0,
            LossKind::Squared,
        )
        .unwrap();
        assert_eq!(two.chosen, 0);
        assert!(matches!(
            select_model(&[], &d, 0.5, 0, LossKind::Squared),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn failed_candidates_are_excluded() {
        // 3 training points cannot determine a degree-5 polynomial
        let d = quadratic(6);
        let report = select_model(
            &[
                HypothesisSpace::Polynomial { degree: 5, lambda: 0.0 },
                HypothesisSpace::Polynomial { degree: 1, lambda: 0.0 },
            ],
            &d,
            0.5,
            1,
            LossKind::Squared,
        )
        .unwrap();
        assert!(report.candidates[0].failure.is_some());
        assert_eq!(report.chosen, 1);
    }

    #[test]
    fn same_data_gives_equal_errors() {
        let d = quadratic(10);
        let s = SplitPair {
            train: d.clone(),
            val: d.clone(),
            train_indices: vec![],
            val_indices: vec![],
            split_seed: 0,
            train_fraction: 0.5,
        };
        let model = fit_linreg_closed(&d).unwrap();
        let (t, v) = train_val_errors(&model, &s, LossKind::Squared).unwrap();
        assert_eq!(t, v);
    }

    #[test]
    fn interpolation_overfits_toy_data() {
        let spec = ToyModelSpec {
            w_true: vec![1.0; 10],
            noise_variance: 1.0,
            sample_count: 40,
            seed: 12,
        };
        let d = generate_toy(&spec).unwrap();
        let s = split(&d, 0.25, 3).unwrap();
        let model = fit_linreg_min_norm(&s.train).unwrap();
        let (t, v) = train_val_errors(&model, &s, LossKind::Squared).unwrap();
        assert!(t < 1e-20);
        assert!(v >= 0.5);
    }
}
