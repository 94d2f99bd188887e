//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex dense matrix used by the quantum backend.
pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues and eigenvectors of a real symmetric matrix, sorted by
/// descending eigenvalue.
pub fn symmetric_eigen_sorted(m: &DMatrix<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
    let eig = m.clone().symmetric_eigen();
    let mut pairs: Vec<(f64, DVector<f64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &lambda)| (lambda, eig.eigenvectors.column(k).into_owned()))
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    pairs.into_iter().unzip()
}

/// Eigenvalues of a self-adjoint complex matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let eig = m.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Largest deviation from self-adjointness, `max |m - m^dagger|`.
pub fn asymmetry(m: &CMatrix) -> f64 {
    let adj = m.adjoint();
    (m - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Checks self-adjointness within `tol` and returns the matrix unchanged.
pub fn require_self_adjoint(m: &CMatrix, tol: f64) -> Result<()> {
    let a = asymmetry(m);
    if a > tol {
        return Err(Error::NotSelfAdjoint { max_asymmetry: a });
    }
    Ok(())
}

/// Principal square root of a positive semidefinite self-adjoint matrix.
/// Eigenvalues below zero are clamped, so slightly-noisy PSD inputs are fine.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = eig.eigenvalues[k].max(0.0);
        let v = eig.eigenvectors.column(k);
        out += (&v * v.adjoint()).scale(lambda.sqrt());
    }
    out
}

/// Inverse square root of a positive definite self-adjoint matrix.
pub fn psd_inv_sqrt(m: &CMatrix) -> CMatrix {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = eig.eigenvalues[k];
        let v = eig.eigenvectors.column(k);
        out += (&v * v.adjoint()).scale(1.0 / lambda.sqrt());
    }
    out
}

/// Lawson-Hanson non-negative least squares: minimizes `|a x - y|` over
/// `x >= 0`. Returns the optimizer.
///
/// Used as the feasibility check for finitely generated cones: `y` is in the
/// cone of the columns of `a` iff the residual at the optimum is ~zero.
pub fn nnls(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let n = a.ncols();
    let max_iter = 3 * n.max(10) * 10;
    let mut passive = vec![false; n];
    let mut x = DVector::zeros(n);
    let tol = 1e-12 * a.iter().map(|v| v.abs()).fold(1.0, f64::max);

    let mut iter = 0;
    loop {
        // w = gradient of the residual at x
        let w = a.transpose() * (y - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].partial_cmp(&w[j]).unwrap());
        let Some(j) = candidate else {
            return Ok(x);
        };
        passive[j] = true;

        loop {
            iter += 1;
            if iter > max_iter {
                return Err(Error::FeasibilityNoConvergence(max_iter));
            }
            // Solve the unconstrained problem on the passive set.
            let cols: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let sub = a.select_columns(cols.iter());
            let z_sub = sub
                .clone()
                .svd(true, true)
                .solve(y, 1e-13)
                .map_err(|_| Error::FeasibilityNoConvergence(iter))?;

            if z_sub.iter().all(|&v| v > tol) {
                x.fill(0.0);
                for (idx, &col) in cols.iter().enumerate() {
                    x[col] = z_sub[idx];
                }
                break;
            }
            // Step back to the feasible boundary and drop blocking variables.
            let mut alpha = f64::INFINITY;
            for (idx, &col) in cols.iter().enumerate() {
                if z_sub[idx] <= tol {
                    let denom = x[col] - z_sub[idx];
                    if denom.abs() > 0.0 {
                        alpha = alpha.min(x[col] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (idx, &col) in cols.iter().enumerate() {
                x[col] += alpha * (z_sub[idx] - x[col]);
                if x[col] <= tol {
                    x[col] = 0.0;
                    passive[col] = false;
                }
            }
        }
    }
}
