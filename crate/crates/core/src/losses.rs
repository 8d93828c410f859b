//! Loss functions and empirical risk.

use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::models::Predictor;
use crate::numerics::vector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossKind {
    Squared,
    ZeroOne,
    Hinge,
    Logistic,
    /// Hinge loss plus `lambda * ‖w‖²`.
    SvmReg { lambda: f64 },
}

impl LossKind {
    pub fn is_binary(self) -> bool {
        !matches!(self, LossKind::Squared)
    }

    pub fn validate(self) -> Result<()> {
        match self {
            LossKind::SvmReg { lambda } if !(lambda > 0.0 && lambda.is_finite()) => Err(
                Error::Precondition(format!("svm regularization must be positive, got {lambda}")),
            ),
            _ => Ok(()),
        }
    }
}

/// `log(1 + exp(z))` without overflow.
pub fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn check_binary(y: f64) -> Result<()> {
    if y == 1.0 || y == -1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("label {y} is not in {{-1, +1}}")))
    }
}

/// Loss incurred by predicting `h` for label `y`.
///
/// `w` is only consulted by the regularized SVM loss.
pub fn loss(kind: LossKind, y: f64, h: f64, w: Option<&[f64]>) -> Result<f64> {
    if kind.is_binary() {
        check_binary(y)?;
    }
    let margin = y * h;
    Ok(match kind {
        LossKind::Squared => (y - h) * (y - h),
        LossKind::ZeroOne => {
            if margin < 0.0 {
                1.0
            } else {
                0.0
            }
        }
        LossKind::Hinge => (1.0 - margin).max(0.0),
        LossKind::Logistic => softplus(-margin),
        LossKind::SvmReg { lambda } => {
            kind.validate()?;
            let w = w.ok_or_else(|| {
                Error::Precondition("regularized svm loss needs the weight vector".into())
            })?;
            (1.0 - margin).max(0.0) + lambda * vector::dot(w, w)
        }
    })
}

/// Average loss of `model` over `d`.
pub fn empirical_risk<P: Predictor + ?Sized>(kind: LossKind, model: &P, d: &LabeledDataset) -> Result<f64> {
    d.require_labels()?;
    if d.is_empty() {
        return Err(Error::Size("empirical risk of an empty dataset".into()));
    }
    let w = model.weights();
    let mut total = 0.0;
    for i in 0..d.len() {
        let h = model.predict(d.point(i))?;
        total += loss(kind, d.label(i), h, w)?;
    }
    Ok(total / d.len() as f64)
}

/// Average loss for precomputed predictions.
pub fn risk_from_predictions(kind: LossKind, labels: &[f64], predictions: &[f64]) -> Result<f64> {
    if labels.len() != predictions.len() {
        return Err(Error::Shape(format!(
            "{} labels but {} predictions",
            labels.len(),
            predictions.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::Size("empirical risk of an empty dataset".into()));
    }
    let mut total = 0.0;
    for (&y, &h) in labels.iter().zip(predictions) {
        total += loss(kind, y, h, None)?;
    }
    Ok(total / labels.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::LabeledDataset;
    use crate::models::LinearModel;
    use crate::numerics::DenseMatrix;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const ALL: [LossKind; 4] = [
        LossKind::Squared,
        LossKind::ZeroOne,
        LossKind::Hinge,
        LossKind::Logistic,
    ];

    #[test]
    fn examples() {
        assert_eq!(loss(LossKind::Squared, 3.0, 1.0, None).unwrap(), 4.0);
        assert_relative_eq!(
            loss(LossKind::Logistic, 1.0, 0.0, None).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );
        assert_eq!(loss(LossKind::Hinge, 1.0, 2.0, None).unwrap(), 0.0);
        assert_eq!(loss(LossKind::ZeroOne, 1.0, -2.0, None).unwrap(), 1.0);
        assert_eq!(loss(LossKind::ZeroOne, 1.0, 0.0, None).unwrap(), 0.0);
    }

    #[test]
    fn svm_reg_adds_penalty() {
        let v = loss(LossKind::SvmReg { lambda: 0.5 }, 1.0, 0.5, Some(&[1.0, 2.0])).unwrap();
        assert_relative_eq!(v, 0.5 + 0.5 * 5.0);
        assert!(loss(LossKind::SvmReg { lambda: 0.5 }, 1.0, 0.5, None).is_err());
        assert!(loss(LossKind::SvmReg { lambda: 0.0 }, 1.0, 0.5, Some(&[1.0])).is_err());
    }

    #[test]
    fn binary_losses_reject_real_labels() {
        for kind in [LossKind::ZeroOne, LossKind::Hinge, LossKind::Logistic] {
            assert!(matches!(loss(kind, 0.5, 1.0, None), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn logistic_is_stable() {
        let big = loss(LossKind::Logistic, 1.0, -1000.0, None).unwrap();
        assert_relative_eq!(big, 1000.0, max_relative = 1e-12);
        let tiny = loss(LossKind::Logistic, 1.0, 1000.0, None).unwrap();
        assert!(tiny >= 0.0 && tiny < 1e-300);
    }

    #[test]
    fn perfect_predictor_has_zero_risk() {
        let x = DenseMatrix::from_rows(&[[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]]).unwrap();
        let d = LabeledDataset::regression(x, vec![1.0, 3.0, 5.0]).unwrap();
        let m = LinearModel::new(vec![1.0, 2.0]);
        assert_eq!(empirical_risk(LossKind::Squared, &m, &d).unwrap(), 0.0);
    }

    #[test]
    fn zero_one_risk_is_error_fraction() {
        let x = DenseMatrix::from_rows(&[[1.0], [2.0], [-1.0], [-3.0]]).unwrap();
        let d = LabeledDataset::binary(x, vec![1.0, -1.0, -1.0, 1.0]).unwrap();
        let m = LinearModel::new(vec![1.0]);
        assert_eq!(empirical_risk(LossKind::ZeroOne, &m, &d).unwrap(), 0.5);
    }

    #[test]
    fn zero_one_risk_concentrates() {
        // x ~ N(0,1), y = sign(x + N(0,1)); the sign classifier errs with probability 1/4
        let mut rng = crate::rng::from_seed(17);
        let m = 10_000;
        let mut rows = Vec::with_capacity(m);
        let mut labels = Vec::with_capacity(m);
        for _ in 0..m {
            let x = crate::rng::standard_normal(&mut rng);
            let y = if x + crate::rng::standard_normal(&mut rng) >= 0.0 { 1.0 } else { -1.0 };
            rows.push([x]);
            labels.push(y);
        }
        let d = LabeledDataset::binary(DenseMatrix::from_rows(&rows).unwrap(), labels).unwrap();
        let risk = empirical_risk(LossKind::ZeroOne, &LinearModel::new(vec![1.0]), &d).unwrap();
        assert!((risk - 0.25).abs() < 0.02, "risk {risk}");
    }

    #[test]
    fn empty_predictions_rejected() {
        assert!(matches!(risk_from_predictions(LossKind::Squared, &[], &[]), Err(Error::Size(_))));
    }

    proptest! {
        #[test]
        fn nonnegative(y in prop::sample::select(vec![-1.0, 1.0]), h in -50.0f64..50.0) {
            for kind in ALL {
                prop_assert!(loss(kind, y, h, None).unwrap() >= 0.0);
            }
        }

        #[test]
        fn surrogates_bound_zero_one(y in prop::sample::select(vec![-1.0, 1.0]), h in -50.0f64..50.0) {
            let zo = loss(LossKind::ZeroOne, y, h, None).unwrap();
            prop_assert!(loss(LossKind::Hinge, y, h, None).unwrap() >= zo);
            prop_assert!(loss(LossKind::Logistic, y, h, None).unwrap() / std::f64::consts::LN_2 >= zo);
        }

        #[test]
        fn negative_label_mirrors_positive(h in -50.0f64..50.0) {
            for kind in ALL {
                let a = loss(kind, -1.0, h, None).unwrap();
                let b = loss(kind, 1.0, -h, None).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            }
        }

        #[test]
        fn squared_symmetric_in_residual(y in -10.0f64..10.0, r in -10.0f64..10.0) {
            let a = loss(LossKind::Squared, y, y + r, None).unwrap();
            let b = loss(LossKind::Squared, y, y - r, None).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }
    }

    #[test]
    fn surrogates_decrease_in_margin() {
        for kind in [LossKind::Hinge, LossKind::Logistic, LossKind::ZeroOne] {
            let mut prev = f64::INFINITY;
            for i in -200..=200 {
                let v = loss(kind, 1.0, i as f64 * 0.1, None).unwrap();
                assert!(v <= prev);
                prev = v;
            }
            assert!(prev < 1e-8);
        }
    }
}
