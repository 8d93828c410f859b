//! End-to-end flows through the public API.

use erm_core::cluster::{kmeans, KmeansConfig};
use erm_core::data::{generate_toy, normalize, read_csv, split, write_csv, LabelKind, ToyModelSpec};
use erm_core::dimred::{fit_pca, pca_regression, reconstruction_error};
use erm_core::learners::{fit_linreg_closed, fit_logreg, fit_ridge_closed, grow_tree, RidgeSpec};
use erm_core::losses::{empirical_risk, LossKind};
use erm_core::models::{Model, Predictor};
use erm_core::optimize::GdConfig;
use erm_core::validate::{diagnose, select_model, Diagnosis, HypothesisSpace};
use erm_core::Error;

fn toy(m: usize, sigma2: f64, seed: u64) -> erm_core::data::LabeledDataset {
    generate_toy(&ToyModelSpec {
        w_true: vec![2.0, -1.0, 0.5],
        noise_variance: sigma2,
        sample_count: m,
        seed,
    })
    .unwrap()
}

#[test]
fn csv_roundtrip_fit_and_model_json() {
    let d = toy(80, 0.01, 3);
    let mut buf = Vec::new();
    write_csv(&d, &mut buf, "price").unwrap();
    let back = read_csv(buf.as_slice(), &[], Some("price")).unwrap();
    assert_eq!(back, d);

    let model = Model::Linear(fit_linreg_closed(&back).unwrap());
    let json = model.to_json().unwrap();
    let restored = Model::from_json(&json).unwrap();
    assert_eq!(restored, model);
    for i in 0..d.len() {
        assert_eq!(restored.predict(d.point(i)).unwrap(), model.predict(d.point(i)).unwrap());
    }
    let w = model.weights().unwrap();
    for (a, b) in w.iter().zip([2.0, -1.0, 0.5]) {
        assert!((a - b).abs() < 0.05, "{w:?}");
    }
}

#[test]
fn tree_json_roundtrip_preserves_predictions() {
    let d = toy(60, 0.1, 4);
    let tree = Model::Tree(grow_tree(&d, 3, None).unwrap());
    let restored = Model::from_json(&tree.to_json().unwrap()).unwrap();
    assert_eq!(
        empirical_risk(LossKind::Squared, &tree, &d).unwrap(),
        empirical_risk(LossKind::Squared, &restored, &d).unwrap()
    );
}

#[test]
fn normalize_then_ridge_then_diagnose() {
    let d = toy(200, 0.25, 5);
    let (norm, params) = normalize(&d).unwrap();
    let s = split(&norm, 0.5, 9).unwrap();
    let model = fit_ridge_closed(&s.train, RidgeSpec::new(1e-3).unwrap()).unwrap();
    let train = empirical_risk(LossKind::Squared, &model, &s.train).unwrap();
    let val = empirical_risk(LossKind::Squared, &model, &s.val).unwrap();
    assert_eq!(diagnose(train, val, 0.25).unwrap(), Diagnosis::Satisfactory);
    // the fitted params map the raw data onto the normalized data
    assert_eq!(params.apply(&d).unwrap(), norm);
}

#[test]
fn selection_prefers_the_true_model_size() {
    let d = toy(300, 0.1, 6);
    let cands = [
        HypothesisSpace::Ridge { lambda: 100.0 },
        HypothesisSpace::LinReg,
        HypothesisSpace::Tree { max_depth: 1 },
    ];
    let report = select_model(&cands, &d, 0.6, 11, LossKind::Squared).unwrap();
    assert_eq!(report.chosen().space, HypothesisSpace::LinReg);
    assert_eq!(report.candidates.len(), 3);
}

#[test]
fn logistic_regression_on_separable_directions() {
    let d = toy(400, 0.5, 7);
    let y: Vec<f64> = d.labels().iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
    let cls = erm_core::data::LabeledDataset::binary(d.features().clone(), y).unwrap();
    assert_eq!(cls.label_kind(), LabelKind::Binary);
    let (model, trace) = fit_logreg(&cls, &GdConfig::default()).unwrap();
    assert!(trace.converged);
    assert!(empirical_risk(LossKind::ZeroOne, &model, &cls).unwrap() < 0.15);
}

#[test]
fn pca_compression_feeds_clustering() {
    let d = toy(120, 0.0, 8);
    let p = fit_pca(d.features(), 2, true).unwrap();
    assert!((reconstruction_error(&p, d.features()).unwrap() - p.error()).abs() < 1e-10);
    let res = kmeans(d.features(), &KmeansConfig::new(2, 1)).unwrap();
    assert_eq!(res.assignments.len(), 120);
}

#[test]
fn pca_regression_budget_is_enforced() {
    let d = toy(3, 0.1, 9);
    assert!(matches!(pca_regression(&d, 3, None, true), Err(Error::Budget { .. })));
    let d = toy(50, 0.1, 9);
    assert!(pca_regression(&d, 2, Some(0.1), true).is_ok());
}
