//! Self-adjoint operator coordinates.
//!
//! Fixes the reference basis used for quantum boundary spaces: the scaled
//! identity first, then the generalized Gell-Mann family (symmetric and
//! antisymmetric off-diagonal pairs in lexicographic order, then diagonal
//! traceless elements). All elements are trace-orthonormal, so the
//! Hilbert-Schmidt pairing has the identity Gram matrix in these coordinates.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{require_self_adjoint, CMatrix};

const SELF_ADJOINT_TOL: f64 = 1e-10;

fn unit(n: usize, r: usize, c: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(r, c)] = Complex64::new(1.0, 0.0);
    m
}

/// The reference basis of the space of self-adjoint `n x n` matrices:
/// `n^2` elements with `tr(B_i B_j) = delta_ij`, identity-first.
pub fn basis(n: usize) -> Vec<CMatrix> {
    assert!(n >= 1, "Hilbert space dimension must be positive");
    let mut out = Vec::with_capacity(n * n);
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    out.push(CMatrix::identity(n, n).scale(inv_sqrt_n));
    let inv_sqrt_2 = 1.0 / 2.0_f64.sqrt();
    for j in 0..n {
        for k in (j + 1)..n {
            let sym = (unit(n, j, k) + unit(n, k, j)).scale(inv_sqrt_2);
            let mut anti = CMatrix::zeros(n, n);
            anti[(j, k)] = Complex64::new(0.0, -inv_sqrt_2);
            anti[(k, j)] = Complex64::new(0.0, inv_sqrt_2);
            out.push(sym);
            out.push(anti);
        }
    }
    for l in 1..n {
        let mut d = CMatrix::zeros(n, n);
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        for m in 0..l {
            d[(m, m)] = Complex64::new(norm, 0.0);
        }
        d[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
        out.push(d);
    }
    out
}

/// Coordinates of a self-adjoint matrix in the reference basis:
/// `c_i = tr(B_i a)`.
pub fn coords_of_matrix(a: &CMatrix) -> Result<Vec<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    require_self_adjoint(a, SELF_ADJOINT_TOL)?;
    Ok(basis(n)
        .iter()
        .map(|b| (b * a).trace().re)
        .collect())
}

/// Reconstructs the self-adjoint matrix `sum_i c_i B_i`.
pub fn matrix_from_coords(n: usize, coords: &[f64]) -> CMatrix {
    assert_eq!(coords.len(), n * n, "coordinate length must be n^2");
    let mut out = CMatrix::zeros(n, n);
    for (c, b) in coords.iter().zip(basis(n)) {
        out += b.scale(*c);
    }
    out
}

/// Diagonal self-adjoint matrix from real entries.
pub fn diag(entries: &[f64]) -> CMatrix {
    let n = entries.len();
    let mut m = CMatrix::zeros(n, n);
    for (i, &e) in entries.iter().enumerate() {
        m[(i, i)] = Complex64::new(e, 0.0);
    }
    m
}

/// Rank-one projector `|psi><psi|` from complex amplitudes (not normalized).
pub fn projector(amplitudes: &[Complex64]) -> CMatrix {
    let v = DVector::from_column_slice(amplitudes);
    &v * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basis_is_trace_orthonormal() {
        for n in 1..=4 {
            let b = basis(n);
            assert_eq!(b.len(), n * n);
            for (i, bi) in b.iter().enumerate() {
                assert!(require_self_adjoint(bi, 1e-12).is_ok());
                for (j, bj) in b.iter().enumerate() {
                    let t = (bi * bj).trace();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(t.re, want, epsilon = 1e-12);
                    assert_abs_diff_eq!(t.im, 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn coords_round_trip() {
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.5, -0.25),
                Complex64::new(0.5, 0.25),
                Complex64::new(-2.0, 0.0),
            ],
        );
        let coords = coords_of_matrix(&a).unwrap();
        let back = matrix_from_coords(2, &coords);
        for (x, y) in back.iter().zip(a.iter()) {
            assert_abs_diff_eq!(x.re, y.re, epsilon = 1e-12);
            assert_abs_diff_eq!(x.im, y.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_non_self_adjoint() {
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        assert!(matches!(
            coords_of_matrix(&a),
            Err(Error::NotSelfAdjoint { .. })
        ));
    }
}
