//! Dense linear algebra for the small symmetric problems that show up in
//! least squares, PCA and Gaussian models.

mod evd;
mod matrix;
mod solve;
pub mod vector;

pub use evd::{condition_number, max_eigenvalue, sym_evd, SymmetricEvd};
pub use matrix::DenseMatrix;
pub use solve::{cholesky, solve_spd, Cholesky};

/// Relative eigenvalue threshold below which a psd matrix is treated as singular.
pub const RANK_TOL: f64 = 1e-10;
