use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use erm_core::cluster::{
    elbow_sweep, gmm_em, kmeans_multi_restart, GmmConfig, KmeansConfig, KmeansInit,
};
use erm_core::data::{self, generate_toy, normalize, write_csv, LabelKind, LabeledDataset, ToyModelSpec};
use erm_core::dimred::{fit_pca, write_scatter_csv};
use erm_core::learners::{
    fit_bayes, fit_linreg_closed, fit_linreg_gd, fit_logreg, fit_ridge_closed, fit_ridge_gd, fit_svm, grow_tree,
    RidgeSpec,
};
use erm_core::losses::{empirical_risk, LossKind};
use erm_core::models::{KnnMode, KnnModel, LinearModel, Model};
use erm_core::numerics::DenseMatrix;
use erm_core::optimize::{auto_step_size, GdConfig, GdTrace, Objective, StepSize};
use erm_core::rng;
use erm_core::validate::{
    bias_variance_experiment, ridge_bias_variance_experiment, select_model, write_sweep_csv, HypothesisSpace,
};
use serde::Serialize;
use serde_json::json;

use crate::args::*;
use crate::output::{CliError, CliResult, Output};

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Puts the path into I/O errors so the message names the offending file.
fn with_path(e: erm_core::Error, path: &Path) -> CliError {
    match e {
        erm_core::Error::Io(io) => CliError::Core(std::io::Error::new(io.kind(), format!("{}: {io}", path.display())).into()),
        other => other.into(),
    }
}

fn load_labeled(a: &DataArgs) -> CliResult<LabeledDataset> {
    data::load_csv(&a.data, &a.features, Some(&a.label)).map_err(|e| with_path(e, &a.data))
}

fn load_points(path: &Path, features: &[String]) -> CliResult<DenseMatrix> {
    Ok(data::load_csv(path, features, None).map_err(|e| with_path(e, path))?.features().clone())
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> erm_core::Result<()>) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn write_dataset(d: &LabeledDataset, path: &Path, label: &str) -> CliResult<()> {
    let file = File::create(path).map_err(|e| with_path(e.into(), path))?;
    write_csv(d, BufWriter::new(file), label).map_err(|e| with_path(e, path))
}

fn parse_step(s: &str) -> CliResult<StepSize> {
    if s == "auto" {
        return Ok(StepSize::Auto);
    }
    match s.parse::<f64>() {
        Ok(alpha) if alpha > 0.0 && alpha.is_finite() => Ok(StepSize::Fixed { alpha }),
        _ => Err(config(format!("--step must be `auto` or a positive number, got `{s}`"))),
    }
}

fn require<T: Copy>(v: Option<T>, flag: &str, algo: &str) -> CliResult<T> {
    v.ok_or_else(|| config(format!("{flag} is required for --algo {algo}")))
}

fn check_lambda(lambda: f64) -> CliResult<f64> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(lambda)
    } else {
        Err(config(format!("--lambda must be finite and nonnegative, got {lambda}")))
    }
}

#[derive(Serialize)]
struct FitReport {
    algo: String,
    loss: LossKind,
    train_points: usize,
    val_points: usize,
    train_error: f64,
    val_error: Option<f64>,
    iterations: Option<usize>,
    converged: Option<bool>,
    /// Constant step, or the first step of a decaying schedule.
    step_size: Option<f64>,
    step_rule: Option<String>,
    model: Model,
}

struct Fitted {
    model: Model,
    trace: Option<GdTrace>,
    step_size: Option<f64>,
    step_rule: Option<String>,
}

impl Fitted {
    fn closed(model: Model) -> Self {
        Self {
            model,
            trace: None,
            step_size: None,
            step_rule: None,
        }
    }

    fn iterative(model: LinearModel, trace: GdTrace, obj: Objective, train: &LabeledDataset, cfg: &GdConfig) -> CliResult<Self> {
        let (step_size, rule) = match (cfg.step_size, obj) {
            (StepSize::Fixed { alpha }, _) => (alpha, "fixed".to_string()),
            (StepSize::Decaying { scale }, _) => (scale, "scale/k".to_string()),
            (StepSize::Auto, Objective::HingeSubgradient { lambda }) => (1.0 / (2.0 * lambda), "1/(2 lambda k)".to_string()),
            (StepSize::Auto, _) => (auto_step_size(obj, train)?, "auto".to_string()),
        };
        Ok(Self {
            model: Model::Linear(model),
            trace: Some(trace),
            step_size: Some(step_size),
            step_rule: Some(rule),
        })
    }
}

fn algo_name(algo: Algo) -> &'static str {
    match algo {
        Algo::Linreg => "linreg",
        Algo::Ridge => "ridge",
        Algo::Logreg => "logreg",
        Algo::Svm => "svm",
        Algo::Bayes => "bayes",
        Algo::NaiveBayes => "naive-bayes",
        Algo::Tree => "tree",
        Algo::Knn => "knn",
    }
}

pub fn fit(a: &FitArgs, seed: u64) -> CliResult<Output> {
    let name = algo_name(a.algo);
    if !(0.0..1.0).contains(&a.val_frac) {
        return Err(config(format!("--val-frac must lie in [0, 1), got {}", a.val_frac)));
    }
    if a.degree.is_some() && !matches!(a.algo, Algo::Linreg | Algo::Ridge) {
        return Err(config(format!("--degree applies to linreg and ridge, not --algo {name}")));
    }
    if a.degree.is_some() && a.solver == Solver::Gd {
        return Err(config("--degree requires --solver closed"));
    }
    let gd = GdConfig {
        step_size: parse_step(&a.step)?,
        max_iters: a.max_iters,
        seed,
        ..GdConfig::default()
    };
    gd.validate()?;

    let d = load_labeled(&a.data)?;
    let (train, val) = if a.val_frac == 0.0 {
        (d, None)
    } else {
        let s = data::split(&d, 1.0 - a.val_frac, seed)?;
        (s.train, Some(s.val))
    };
    let binary_labels = train.label_kind() == LabelKind::Binary;

    let fitted = match a.algo {
        Algo::Linreg | Algo::Ridge => {
            let lambda = match a.algo {
                Algo::Ridge => check_lambda(require(a.lambda, "--lambda", name)?)?,
                _ => 0.0,
            };
            match (a.degree, a.solver) {
                (Some(degree), _) => Fitted::closed(HypothesisSpace::Polynomial { degree, lambda }.fit(&train, &gd)?),
                (None, Solver::Closed) if a.algo == Algo::Linreg => Fitted::closed(Model::Linear(fit_linreg_closed(&train)?)),
                (None, Solver::Closed) => Fitted::closed(Model::Linear(fit_ridge_closed(&train, RidgeSpec::new(lambda)?)?)),
                (None, Solver::Gd) if a.algo == Algo::Linreg => {
                    let (m, t) = fit_linreg_gd(&train, &gd)?;
                    Fitted::iterative(m, t, Objective::LinReg, &train, &gd)?
                }
                (None, Solver::Gd) => {
                    let (m, t) = fit_ridge_gd(&train, RidgeSpec::new(lambda)?, &gd)?;
                    Fitted::iterative(m, t, Objective::Ridge { lambda }, &train, &gd)?
                }
            }
        }
        Algo::Logreg => {
            let (m, t) = fit_logreg(&train, &gd)?;
            Fitted::iterative(m, t, Objective::LogReg, &train, &gd)?
        }
        Algo::Svm => {
            let lambda = require(a.lambda, "--lambda", name)?;
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(config(format!("--lambda must be positive for svm, got {lambda}")));
            }
            let (m, t) = fit_svm(&train, lambda, &gd)?;
            Fitted::iterative(m, t, Objective::HingeSubgradient { lambda }, &train, &gd)?
        }
        Algo::Bayes | Algo::NaiveBayes => Fitted::closed(Model::Linear(fit_bayes(&train, a.algo == Algo::NaiveBayes)?.0)),
        Algo::Tree => Fitted::closed(Model::Tree(grow_tree(&train, a.max_depth, None)?)),
        Algo::Knn => {
            let k = require(a.k, "--k", name)?;
            let mode = if binary_labels { KnnMode::Majority } else { KnnMode::Mean };
            Fitted::closed(Model::Knn(KnnModel::new(&train, k, mode)?))
        }
    };

    let loss = match a.algo {
        Algo::Linreg | Algo::Ridge => LossKind::Squared,
        Algo::Logreg | Algo::Svm | Algo::Bayes | Algo::NaiveBayes => LossKind::ZeroOne,
        Algo::Tree | Algo::Knn if binary_labels => LossKind::ZeroOne,
        Algo::Tree | Algo::Knn => LossKind::Squared,
    };
    let train_error = empirical_risk(loss, &fitted.model, &train)?;
    let val_error = val.as_ref().map(|v| empirical_risk(loss, &fitted.model, v)).transpose()?;
    if let Some(path) = &a.model_out {
        std::fs::write(path, fitted.model.to_json()? + "\n")?;
    }
    let report = FitReport {
        algo: name.to_string(),
        loss,
        train_points: train.len(),
        val_points: val.as_ref().map_or(0, LabeledDataset::len),
        train_error,
        val_error,
        iterations: fitted.trace.as_ref().map(|t| t.iterations),
        converged: fitted.trace.as_ref().map(|t| t.converged),
        step_size: fitted.step_size,
        step_rule: fitted.step_rule,
        model: fitted.model,
    };
    Output::report(&report, a.out.as_deref())
}

/// `a..b` (inclusive) or a comma list.
fn parse_usize_grid(s: &str, flag: &str) -> CliResult<Vec<usize>> {
    let bad = || config(format!("{flag}: expected `a..b` or a comma list of integers, got `{s}`"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect()
}

fn parse_candidate(spec: &str) -> CliResult<Vec<HypothesisSpace>> {
    let bad = |why: &str| config(format!("--candidates: `{spec}` {why}"));
    let parts: Vec<&str> = spec.trim().split(':').collect();
    let num = |i: usize| -> CliResult<f64> {
        let p = parts.get(i).ok_or_else(|| bad("is missing a parameter"))?;
        p.parse().map_err(|_| bad("has a non-numeric parameter"))
    };
    let int = |i: usize| -> CliResult<usize> {
        let p = parts.get(i).ok_or_else(|| bad("is missing a parameter"))?;
        p.parse().map_err(|_| bad("has a non-integer parameter"))
    };
    let arity = |n: usize| if parts.len() > n { Err(bad("has too many parameters")) } else { Ok(()) };
    Ok(match parts[0] {
        "linreg" => {
            arity(1)?;
            vec![HypothesisSpace::LinReg]
        }
        "ridge" => {
            arity(2)?;
            vec![HypothesisSpace::Ridge { lambda: num(1)? }]
        }
        "poly" => {
            arity(3)?;
            let lambda = if parts.len() == 3 { num(2)? } else { 0.0 };
            let degrees = parse_usize_grid(parts.get(1).ok_or_else(|| bad("is missing a degree"))?, "--candidates")?;
            degrees
                .into_iter()
                .map(|degree| HypothesisSpace::Polynomial { degree, lambda })
                .collect()
        }
        "logreg" => {
            arity(1)?;
            vec![HypothesisSpace::LogReg]
        }
        "svm" => {
            arity(2)?;
            vec![HypothesisSpace::Svm { lambda: num(1)? }]
        }
        "bayes" | "naive-bayes" => {
            arity(1)?;
            vec![HypothesisSpace::Bayes { naive: parts[0] == "naive-bayes" }]
        }
        "tree" => {
            arity(2)?;
            vec![HypothesisSpace::Tree { max_depth: int(1)? }]
        }
        "knn" => {
            arity(2)?;
            vec![HypothesisSpace::Knn {
                k: int(1)?,
                mode: KnnMode::Mean,
            }]
        }
        _ => return Err(bad("is not a known hypothesis space")),
    })
}

pub fn select(a: &SelectArgs, seed: u64) -> CliResult<Output> {
    let mut candidates = Vec::new();
    for spec in a.candidates.iter().filter(|s| !s.trim().is_empty()) {
        candidates.extend(parse_candidate(spec)?);
    }
    if candidates.is_empty() {
        return Err(config("--candidates: at least one candidate is required"));
    }
    if !(a.val_frac > 0.0 && a.val_frac < 1.0) {
        return Err(config(format!("--val-frac must lie in (0, 1), got {}", a.val_frac)));
    }
    let d = load_labeled(&a.data)?;
    let binary = d.label_kind() == LabelKind::Binary;
    if binary {
        for c in &mut candidates {
            if let HypothesisSpace::Knn { mode, .. } = c {
                *mode = KnnMode::Majority;
            }
        }
    }
    let loss = match a.loss {
        Some(LossArg::Squared) => LossKind::Squared,
        Some(LossArg::ZeroOne) => LossKind::ZeroOne,
        Some(LossArg::Hinge) => LossKind::Hinge,
        Some(LossArg::Logistic) => LossKind::Logistic,
        None if binary => LossKind::ZeroOne,
        None => LossKind::Squared,
    };
    let report = select_model(&candidates, &d, 1.0 - a.val_frac, seed, loss)?;
    match a.format {
        Format::Json => {
            let value = json!({
                "chosen_id": report.chosen().id,
                "chosen": report.chosen,
                "loss": report.loss,
                "candidates": report.candidates,
            });
            Output::report(&value, a.out.as_deref())
        }
        Format::Csv => {
            let bytes = csv_bytes(|buf| {
                let mut w = csv::Writer::from_writer(buf);
                w.write_record(["id", "train_error", "val_error", "chosen", "failure"])?;
                let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                for (i, c) in report.candidates.iter().enumerate() {
                    w.write_record([
                        c.id.clone(),
                        opt(c.train_error),
                        opt(c.val_error),
                        (i == report.chosen).to_string(),
                        c.failure.clone().unwrap_or_default(),
                    ])?;
                }
                w.flush()?;
                Ok(())
            })?;
            Ok(Output::table(bytes, a.out.as_deref()))
        }
    }
}

fn true_weights(dim: Option<usize>, w_true: &[f64]) -> CliResult<Vec<f64>> {
    match (dim, w_true.is_empty()) {
        (Some(n), false) if n != w_true.len() => Err(config(format!(
            "--dim {n} disagrees with the {} entries of --w-true",
            w_true.len()
        ))),
        (_, false) => Ok(w_true.to_vec()),
        (Some(0), true) => Err(config("--dim must be positive")),
        (n, true) => Ok(vec![1.0; n.unwrap_or(10)]),
    }
}

pub fn biasvar(a: &BiasvarArgs, seed: u64) -> CliResult<Output> {
    if a.trials == 0 {
        return Err(config("--trials must be positive"));
    }
    let spec = ToyModelSpec {
        w_true: true_weights(a.dim, &a.w_true)?,
        noise_variance: a.sigma2,
        sample_count: a.samples,
        seed,
    };
    spec.validate()?;
    let results = if !a.lambda.is_empty() {
        if a.r_grid.is_some() {
            return Err(config("--lambda and --r-grid select different sweeps; give one"));
        }
        a.lambda
            .iter()
            .map(|&l| ridge_bias_variance_experiment(&spec, check_lambda(l)?, a.trials).map_err(CliError::from))
            .collect::<CliResult<Vec<_>>>()?
    } else {
        let grid = match &a.r_grid {
            Some(g) => parse_usize_grid(g, "--r-grid")?,
            None => (1..=spec.dim()).collect(),
        };
        grid.into_iter()
            .map(|r| bias_variance_experiment(&spec, r, a.trials).map_err(CliError::from))
            .collect::<CliResult<Vec<_>>>()?
    };
    match a.format {
        Format::Json => Output::report(&results, a.out.as_deref()),
        Format::Csv => Ok(Output::table(csv_bytes(|b| write_sweep_csv(&results, b))?, a.out.as_deref())),
    }
}

pub fn cluster(a: &ClusterArgs, seed: u64) -> CliResult<Output> {
    let points = load_points(&a.data, &a.features)?;
    let init = match a.init {
        InitArg::Sample => KmeansInit::SamplePoints,
        InitArg::Normal => KmeansInit::RandomNormal,
    };
    if !(a.epsilon >= 0.0 && a.epsilon.is_finite()) {
        return Err(config(format!("--epsilon must be finite and nonnegative, got {}", a.epsilon)));
    }
    let out = a.out.as_deref();
    match a.algo {
        ClusterAlgo::Kmeans => {
            let cfg = KmeansConfig {
                init,
                epsilon: a.epsilon,
                ..KmeansConfig::new(a.k, seed)
            };
            let summary = kmeans_multi_restart(&points, &cfg, a.restarts)?;
            match a.format {
                Format::Json => {
                    let best = &summary.best;
                    let value = json!({
                        "algo": "kmeans",
                        "k": a.k,
                        "error": best.error,
                        "iterations": best.iterations,
                        "error_trace": best.error_trace,
                        "means": best.means,
                        "assignments": best.assignments,
                        "best_restart": summary.best_restart,
                        "restart_errors": summary.restart_errors,
                    });
                    Output::report(&value, out)
                }
                Format::Csv => Ok(Output::table(csv_bytes(|b| summary.best.write_csv(b))?, out)),
            }
        }
        ClusterAlgo::Gmm => {
            if a.init != InitArg::Sample {
                return Err(config("--init normal is only available for kmeans"));
            }
            let res = gmm_em(&points, &GmmConfig::new(a.k, seed))?;
            match a.format {
                Format::Json => {
                    let value = json!({
                        "algo": "gmm",
                        "k": a.k,
                        "nll": res.nll_trace.last(),
                        "nll_trace": res.nll_trace,
                        "iterations": res.iterations,
                        "converged": res.converged,
                        "params": res.params,
                        "assignments": res.hard_assignments(),
                    });
                    Output::report(&value, out)
                }
                Format::Csv => Ok(Output::table(csv_bytes(|b| res.write_csv(b))?, out)),
            }
        }
        ClusterAlgo::Elbow => {
            let curve = elbow_sweep(&points, a.k, a.restarts, seed)?;
            match a.format {
                Format::Json => {
                    let rows: Vec<_> = curve.iter().map(|&(k, error)| json!({ "k": k, "error": error })).collect();
                    Output::report(&json!({ "algo": "elbow", "curve": rows }), out)
                }
                Format::Csv => {
                    let bytes = csv_bytes(|buf| {
                        let mut w = csv::Writer::from_writer(buf);
                        w.write_record(["k", "error"])?;
                        for (k, e) in &curve {
                            w.write_record([k.to_string(), e.to_string()])?;
                        }
                        w.flush()?;
                        Ok(())
                    })?;
                    Ok(Output::table(bytes, out))
                }
            }
        }
    }
}

pub fn pca(a: &PcaArgs) -> CliResult<Output> {
    let points = load_points(&a.data, &a.features)?;
    if a.n_pc > points.cols() {
        return Err(config(format!("--n-pc {} exceeds the {} features", a.n_pc, points.cols())));
    }
    let model = fit_pca(&points, a.n_pc, !a.no_center)?;
    match a.format {
        Format::Json => {
            let value = json!({
                "n_pc": model.n,
                "dim": model.input_dim(),
                "centered": model.center.is_some(),
                "spectrum": model.spectrum,
                "reconstruction_error": model.error(),
                "compression": model.compression,
                "center": model.center,
            });
            Output::report(&value, a.out.as_deref())
        }
        Format::Csv => Ok(Output::table(
            csv_bytes(|b| write_scatter_csv(&model, &points, b))?,
            a.out.as_deref(),
        )),
    }
}

pub fn normalize_cmd(a: &NormalizeArgs) -> CliResult<Output> {
    let d = load_labeled(&a.data)?;
    let (normalized, params) = normalize(&d)?;
    write_dataset(&normalized, &a.out, &a.data.label)?;
    let value = json!({
        "points": normalized.len(),
        "features": normalized.feature_names(),
        "params": params,
        "out": a.out,
    });
    Output::report(&value, None)
}

pub fn split_cmd(a: &SplitArgs, seed: u64) -> CliResult<Output> {
    let d = load_labeled(&a.data)?;
    let s = data::split(&d, a.train_frac, seed)?;
    write_dataset(&s.train, &a.out_train, &a.data.label)?;
    write_dataset(&s.val, &a.out_val, &a.data.label)?;
    let value = json!({
        "train_fraction": s.train_fraction,
        "train_points": s.train.len(),
        "val_points": s.val.len(),
        "train_indices": s.train_indices,
        "val_indices": s.val_indices,
    });
    Output::report(&value, None)
}

pub fn gen_toy(a: &GenToyArgs, seed: u64) -> CliResult<Output> {
    if a.samples == 0 {
        return Err(config("--samples must be positive"));
    }
    if !(a.sigma2 >= 0.0 && a.sigma2.is_finite()) {
        return Err(config(format!("--sigma2 must be finite and nonnegative, got {}", a.sigma2)));
    }
    let mut r = rng::from_seed(seed);
    let (d, details) = match a.kind {
        ToyKind::Linear | ToyKind::Binary => {
            let spec = ToyModelSpec {
                w_true: true_weights(a.dim, &a.w_true)?,
                noise_variance: a.sigma2,
                sample_count: a.samples,
                seed,
            };
            let d = generate_toy(&spec)?;
            let d = if a.kind == ToyKind::Binary {
                let y = d.labels().iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
                LabeledDataset::binary(d.features().clone(), y)?
            } else {
                d
            };
            (d, json!({ "w_true": spec.w_true }))
        }
        ToyKind::Cubic => {
            let sigma = a.sigma2.sqrt();
            let mut x = Vec::with_capacity(a.samples);
            let mut y = Vec::with_capacity(a.samples);
            for _ in 0..a.samples {
                let v = rng::standard_normal(&mut r);
                x.push(v);
                y.push(v * v * v - v + sigma * rng::standard_normal(&mut r));
            }
            let d = LabeledDataset::regression(DenseMatrix::new(a.samples, 1, x)?, y)?;
            (d, json!({ "truth": "x^3 - x" }))
        }
        ToyKind::Blobs => {
            let dim = a.dim.unwrap_or(2);
            if dim == 0 || a.k == 0 {
                return Err(config("--dim and --k must be positive"));
            }
            let centers: Vec<Vec<f64>> = (0..a.k)
                .map(|_| rng::standard_normal_vec(&mut r, dim).iter().map(|v| 5.0 * v).collect())
                .collect();
            let mut data = Vec::with_capacity(a.samples * dim);
            for i in 0..a.samples {
                let c = &centers[i % a.k];
                let noise = rng::standard_normal_vec(&mut r, dim);
                data.extend(c.iter().zip(&noise).map(|(c, e)| c + a.sigma2.sqrt() * e));
            }
            let d = LabeledDataset::unlabeled(DenseMatrix::new(a.samples, dim, data)?)?;
            (d, json!({ "centers": centers }))
        }
    };
    write_dataset(&d, &a.out, "y")?;
    let value = json!({
        "kind": format!("{:?}", a.kind).to_lowercase(),
        "points": d.len(),
        "dim": d.dim(),
        "noise_variance": a.sigma2,
        "details": details,
        "out": a.out,
    });
    Output::report(&value, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_parse_ranges_and_lists() {
        assert_eq!(parse_usize_grid("1..4", "--r-grid").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_usize_grid("2, 4,6", "--r-grid").unwrap(), vec![2, 4, 6]);
        assert!(parse_usize_grid("4..1", "--r-grid").is_err());
        assert!(parse_usize_grid("a", "--r-grid").is_err());
    }

    #[test]
    fn candidate_grammar() {
        assert_eq!(parse_candidate("poly:0..2").unwrap().len(), 3);
        assert_eq!(
            parse_candidate("poly:3:0.5").unwrap(),
            vec![HypothesisSpace::Polynomial { degree: 3, lambda: 0.5 }]
        );
        assert_eq!(parse_candidate("ridge:2").unwrap(), vec![HypothesisSpace::Ridge { lambda: 2.0 }]);
        assert_eq!(parse_candidate("naive-bayes").unwrap(), vec![HypothesisSpace::Bayes { naive: true }]);
        for bad in ["ridge", "ridge:x", "linreg:1", "forest:3"] {
            let e = parse_candidate(bad).unwrap_err();
            assert!(e.to_string().contains("--candidates"), "{e}");
        }
    }

    #[test]
    fn step_flag() {
        assert_eq!(parse_step("auto").unwrap(), StepSize::Auto);
        assert_eq!(parse_step("0.5").unwrap(), StepSize::Fixed { alpha: 0.5 });
        assert!(parse_step("-1").is_err());
        assert!(parse_step("fast").is_err());
    }

    #[test]
    fn weights_default_and_conflicts() {
        assert_eq!(true_weights(None, &[]).unwrap(), vec![1.0; 10]);
        assert_eq!(true_weights(Some(3), &[]).unwrap(), vec![1.0; 3]);
        assert_eq!(true_weights(None, &[2.0, 1.0]).unwrap(), vec![2.0, 1.0]);
        assert!(true_weights(Some(3), &[2.0, 1.0]).is_err());
    }
}
