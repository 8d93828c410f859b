use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Seed used when `--seed` is not given, so documented runs reproduce.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "erm", version, about = "Empirical risk minimization toolkit")]
pub struct Cli {
    /// Seed for every random choice the command makes.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Worker threads for Monte-Carlo trials and k-means restarts.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one learner on a train split and report train/validation errors.
    Fit(FitArgs),
    /// Compare hypothesis spaces on a validation split.
    Select(SelectArgs),
    /// Monte-Carlo bias/variance sweep on the linear-Gaussian toy model.
    Biasvar(BiasvarArgs),
    /// k-means, Gaussian mixture EM or an elbow sweep.
    Cluster(ClusterArgs),
    /// Principal component analysis.
    Pca(PcaArgs),
    /// Center and scale every feature to unit mean square.
    Normalize(NormalizeArgs),
    /// Random train/validation split.
    Split(SplitArgs),
    /// Generate a synthetic dataset.
    GenToy(GenToyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    pub data: PathBuf,

    /// Label column.
    #[arg(long, default_value = "y")]
    pub label: String,

    /// Feature columns (comma separated); all non-label columns by default.
    #[arg(long, value_delimiter = ',')]
    pub features: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Linreg,
    Ridge,
    Logreg,
    Svm,
    Bayes,
    NaiveBayes,
    Tree,
    Knn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    /// Normal equations.
    Closed,
    /// Gradient descent.
    Gd,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[arg(long, value_enum)]
    pub algo: Algo,

    /// Regularization strength (required for ridge and svm).
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Polynomial degree of a scalar feature (linreg and ridge only).
    #[arg(long)]
    pub degree: Option<usize>,

    /// Number of neighbours (knn).
    #[arg(long)]
    pub k: Option<usize>,

    /// Maximum depth (tree).
    #[arg(long, default_value_t = 3)]
    pub max_depth: usize,

    /// Solver for linreg and ridge.
    #[arg(long, value_enum, default_value_t = Solver::Closed)]
    pub solver: Solver,

    /// Step size: `auto` or a positive number.
    #[arg(long, default_value = "auto")]
    pub step: String,

    #[arg(long, default_value_t = 100_000)]
    pub max_iters: usize,

    /// Fraction of points held out for validation; 0 trains on everything.
    #[arg(long, default_value_t = 0.2)]
    pub val_frac: f64,

    /// Write the fitted model as JSON here.
    #[arg(long)]
    pub model_out: Option<PathBuf>,

    /// Report destination; stdout by default.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    Squared,
    ZeroOne,
    Hinge,
    Logistic,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Candidates, comma separated: `linreg`, `ridge:L`, `poly:D[:L]`,
    /// `poly:A..B`, `logreg`, `svm:L`, `bayes`, `naive-bayes`, `tree:DEPTH`,
    /// `knn:K`.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub candidates: Vec<String>,

    /// Validation loss; squared for real labels, 0/1 for binary labels by default.
    #[arg(long, value_enum)]
    pub loss: Option<LossArg>,

    #[arg(long, default_value_t = 0.3)]
    pub val_frac: f64,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BiasvarArgs {
    /// Number of features of the toy model; 10, or the length of `--w-true`.
    #[arg(long)]
    pub dim: Option<usize>,

    /// Training points per trial.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,

    /// Label noise variance.
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,

    /// True weights (comma separated); all ones by default.
    #[arg(long, value_delimiter = ',')]
    pub w_true: Vec<f64>,

    /// Restricted-model sizes, e.g. `1..8` or `2,4,6`; `1..dim` by default.
    #[arg(long)]
    pub r_grid: Option<String>,

    /// Ridge strengths (comma separated); replaces the r-grid sweep.
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,

    #[arg(long, default_value_t = 1000)]
    pub trials: usize,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClusterAlgo {
    Kmeans,
    Gmm,
    Elbow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    /// Distinct data points.
    Sample,
    /// Draws from a Gaussian fitted to the data.
    Normal,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub data: PathBuf,

    /// Columns to cluster on (comma separated); all columns by default.
    #[arg(long, value_delimiter = ',')]
    pub features: Vec<String>,

    #[arg(long, value_enum, default_value_t = ClusterAlgo::Kmeans)]
    pub algo: ClusterAlgo,

    /// Number of clusters (kmeans, gmm) or the largest k of an elbow sweep.
    #[arg(long)]
    pub k: usize,

    #[arg(long, default_value_t = 10)]
    pub restarts: usize,

    #[arg(long, value_enum, default_value_t = InitArg::Sample)]
    pub init: InitArg,

    /// k-means stops once the error decreases by at most this much.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PcaArgs {
    #[arg(long)]
    pub data: PathBuf,

    #[arg(long, value_delimiter = ',')]
    pub features: Vec<String>,

    /// Number of principal components.
    #[arg(long)]
    pub n_pc: usize,

    /// Use the raw second-moment matrix instead of centering first.
    #[arg(long)]
    pub no_center: bool,

    /// `csv` writes the `pc1,pc2` scatter of every point.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Normalized dataset destination.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[arg(long, default_value_t = 0.8)]
    pub train_frac: f64,

    #[arg(long)]
    pub out_train: PathBuf,

    #[arg(long)]
    pub out_val: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ToyKind {
    /// `y = wᵀx + ε` with standard normal features.
    Linear,
    /// Labels `sign(wᵀx + ε)`.
    Binary,
    /// Scalar feature, `y = x³ − x + ε`.
    Cubic,
    /// Unlabeled Gaussian blobs around `--k` random centers.
    Blobs,
}

#[derive(Debug, Args)]
pub struct GenToyArgs {
    #[arg(long, value_enum, default_value_t = ToyKind::Linear)]
    pub kind: ToyKind,

    /// Number of features; 10, or the length of `--w-true`. Cubic data is always scalar.
    #[arg(long)]
    pub dim: Option<usize>,

    #[arg(long, default_value_t = 50)]
    pub samples: usize,

    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,

    /// True weights (comma separated); all ones by default.
    #[arg(long, value_delimiter = ',')]
    pub w_true: Vec<f64>,

    /// Number of blobs.
    #[arg(long, default_value_t = 3)]
    pub k: usize,

    #[arg(long)]
    pub out: PathBuf,
}
