use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Dimensions of the operands do not agree.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A collection is empty or too small for the requested operation.
    #[error("size error: {0}")]
    Size(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter violates a documented precondition.
    #[error("invalid parameter: {0}")]
    Precondition(String),

    #[error("matrix is singular or not positive definite (pivot {pivot}): {hint}")]
    Singular { pivot: usize, hint: String },

    #[error("no convergence after {iterations} iterations: {what}")]
    Convergence { iterations: usize, what: String },

    #[error(
        "gradient descent diverged at iteration {iteration} (objective {objective:.3e} > 10 x initial {initial:.3e}); try a smaller step size"
    )]
    Divergence {
        iteration: usize,
        objective: f64,
        initial: f64,
    },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("missing column `{0}`")]
    Schema(String),

    #[error("cannot parse `{value}` at row {row}, column `{column}`")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("feature `{0}` is constant and cannot be scaled to unit variance")]
    ConstantFeature(String),

    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    #[error("{0}")]
    Validity(String),

    #[error(
        "{components} components need more than {components} training points (got {points}); keep the number of features below the sample size to avoid overfitting"
    )]
    Budget { components: usize, points: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
