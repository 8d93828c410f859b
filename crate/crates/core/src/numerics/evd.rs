use serde::{Deserialize, Serialize};

use super::{vector, DenseMatrix, RANK_TOL};
use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigendecomposition `A = V diag(λ) Vᵀ` of a symmetric matrix.
///
/// Eigenvalues are sorted in descending order and column `i` of
/// `eigenvectors` belongs to `eigenvalues[i]`. Each eigenvector is oriented so
/// that its first non-negligible component is positive.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetricEvd {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DenseMatrix,
}

impl SymmetricEvd {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.col(i)
    }

    /// `V diag(λ) Vᵀ`
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.dim();
        let mut out = DenseMatrix::zeros(n, n);
        for (k, lambda) in self.eigenvalues.iter().enumerate() {
            let v = self.vector(k);
            for i in 0..n {
                for j in 0..n {
                    out.set(i, j, out.get(i, j) + lambda * v[i] * v[j]);
                }
            }
        }
        out
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
pub fn sym_evd(a: &DenseMatrix) -> Result<SymmetricEvd> {
    a.check_symmetric(SYMMETRY_TOL)?;
    let n = a.rows();
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, 0.5 * (a.get(i, j) + a.get(j, i)));
        }
    }
    let mut v = DenseMatrix::identity(n);
    let scale = m.frobenius_norm();

    let mut converged = n <= 1 || scale == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Convergence {
                iterations: sweeps,
                what: "Jacobi sweeps did not annihilate the off-diagonal part".into(),
            });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        converged = off_diagonal_norm(&m) <= f64::EPSILON * scale;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(j, j).total_cmp(&m.get(i, i)));
    let eigenvalues = order.iter().map(|&i| m.get(i, i)).collect();
    let mut eigenvectors = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.col(src);
        orient(&mut col);
        for (i, x) in col.into_iter().enumerate() {
            eigenvectors.set(i, dst, x);
        }
    }
    Ok(SymmetricEvd {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(m: &DenseMatrix) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m.get(i, j) * m.get(i, j);
            }
        }
    }
    s.sqrt()
}

/// Zeroes `m[p][q]` with a plane rotation and accumulates it into `v`.
fn rotate(m: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize) {
    let apq = m.get(p, q);
    if apq == 0.0 {
        return;
    }
    let app = m.get(p, p);
    let aqq = m.get(q, q);
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = m.rows();

    for k in 0..n {
        let mkp = m.get(k, p);
        let mkq = m.get(k, q);
        m.set(k, p, c * mkp - s * mkq);
        m.set(k, q, s * mkp + c * mkq);
    }
    for k in 0..n {
        let mpk = m.get(p, k);
        let mqk = m.get(q, k);
        m.set(p, k, c * mpk - s * mqk);
        m.set(q, k, s * mpk + c * mqk);
    }
    m.set(p, q, 0.0);
    m.set(q, p, 0.0);

    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, c * vkp - s * vkq);
        v.set(k, q, s * vkp + c * vkq);
    }
}

fn orient(v: &mut [f64]) {
    let scale = vector::norm_inf(v);
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12 * scale) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Largest eigenvalue of a symmetric psd matrix by power iteration.
///
/// Starts from the all-ones vector and restarts from two fixed vectors
/// (alternating signs, then a golden-ratio sequence) so that a start vector
/// orthogonal to the top eigenspace cannot hide the answer. The largest
/// converged Rayleigh quotient is returned.
pub fn max_eigenvalue(a: &DenseMatrix, tol: f64) -> Result<f64> {
    a.check_symmetric(SYMMETRY_TOL)?;
    if tol <= 0.0 {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let n = a.rows();
    if n == 0 {
        return Err(Error::Size("empty matrix".into()));
    }
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }

    let starts: [Vec<f64>; 3] = [
        vec![1.0; n],
        (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect(),
        (0..n)
            .map(|i| ((i as f64 + 1.0) * 0.618_033_988_749_895).fract() - 0.5)
            .collect(),
    ];

    let mut best = f64::NEG_INFINITY;
    for start in starts {
        let Some(rho) = power_iteration(a, start, tol)? else {
            continue;
        };
        if rho < -tol * scale * n as f64 {
            return Err(Error::Domain(format!(
                "matrix is indefinite (Rayleigh quotient {rho:.3e})"
            )));
        }
        best = best.max(rho);
    }
    Ok(best.max(0.0))
}

fn power_iteration(a: &DenseMatrix, start: Vec<f64>, tol: f64) -> Result<Option<f64>> {
    const MAX_ITERS: usize = 100_000;
    let mut x = start;
    let nx = vector::norm(&x);
    if nx == 0.0 {
        return Ok(None);
    }
    x.iter_mut().for_each(|v| *v /= nx);
    let mut rho = 0.0;
    for _ in 0..MAX_ITERS {
        let y = a.matvec(&x)?;
        rho = vector::dot(&x, &y);
        let residual: f64 = y
            .iter()
            .zip(&x)
            .map(|(yi, xi)| (yi - rho * xi).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol * rho.abs().max(f64::MIN_POSITIVE) {
            return Ok(Some(rho));
        }
        let ny = vector::norm(&y);
        if ny == 0.0 {
            // start vector lies in the null space
            return Ok(Some(0.0));
        }
        x = y.into_iter().map(|v| v / ny).collect();
    }
    Ok(Some(rho))
}

/// `λmax / λmin` of a symmetric psd matrix, or `f64::INFINITY` when
/// `λmin ≤ RANK_TOL · λmax`.
pub fn condition_number(a: &DenseMatrix) -> Result<f64> {
    let evd = sym_evd(a)?;
    let Some(&lmax) = evd.eigenvalues.first() else {
        return Err(Error::Size("empty matrix".into()));
    };
    let lmin = *evd.eigenvalues.last().unwrap();
    if lmax <= 0.0 || lmin <= RANK_TOL * lmax {
        return Ok(f64::INFINITY);
    }
    Ok(lmax / lmin)
}
