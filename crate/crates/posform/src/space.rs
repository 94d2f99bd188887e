//! Ordered vector spaces of boundary conditions.
//!
//! A boundary space is a finite-dimensional real vector space with a fixed
//! reference basis, a positive cone singling out the physical boundary
//! conditions, and a symmetric bilinear pairing. The pairing is the value the
//! null-probe of an infinitesimally thin region assigns to a pair of boundary
//! conditions; orthonormalizing it yields the signed basis that drives probe
//! composition.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::herm;
use crate::linalg::{hermitian_eigenvalues, nnls, symmetric_eigen_sorted};

/// Tolerance for cone-membership checks, relative to the vector's sup norm.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Relative eigenvalue threshold below which a pairing counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Handle of a registered [`BoundarySpaceSpec`] inside a [`crate::Context`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpaceId(pub u32);

impl std::fmt::Display for SpaceId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "space#{}", self.0)
    }
}

/// A boundary condition as coordinates in its space's reference basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BcVector {
    pub space: SpaceId,
    pub coords: DVector<f64>,
}

impl BcVector {
    pub fn new(space: SpaceId, coords: impl Into<Vec<f64>>) -> Result<Self> {
        let coords = DVector::from_vec(coords.into());
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFiniteEntry { index });
        }
        Ok(Self { space, coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Zero boundary condition of the given dimension.
    pub fn zero(space: SpaceId, dim: usize) -> Self {
        Self {
            space,
            coords: DVector::zeros(dim),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            space: self.space,
            coords: &self.coords * factor,
        }
    }
}

/// Machine-checkable positive cone.
///
/// Physical boundary conditions are closed under nonnegative combinations;
/// the three supported representations cover the shipped backends (orthant
/// for classical distributions, PSD for quantum states) plus finitely
/// generated cones as a general fallback.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeSpec {
    /// Componentwise-nonnegative vectors.
    Orthant,
    /// Coordinates (in the self-adjoint reference basis) of a positive
    /// semidefinite operator on an `n`-dimensional Hilbert space.
    Psd { n: usize },
    /// Nonnegative combinations of a finite set of extreme rays, given as
    /// coordinate vectors.
    Generators { rays: Vec<DVector<f64>> },
}

impl ConeSpec {
    pub fn generators_from_rows(rays: Vec<Vec<f64>>) -> Self {
        ConeSpec::Generators {
            rays: rays.into_iter().map(DVector::from_vec).collect(),
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            ConeSpec::Orthant => Ok(()),
            ConeSpec::Psd { n } => {
                if n * n != dim {
                    Err(Error::PsdDimension { n: *n, dim })
                } else {
                    Ok(())
                }
            }
            ConeSpec::Generators { rays } => {
                if rays.is_empty() {
                    return Err(Error::EmptyGenerators);
                }
                for (i, ray) in rays.iter().enumerate() {
                    if ray.len() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            got: ray.len(),
                        });
                    }
                    if ray.iter().all(|&c| c == 0.0) {
                        return Err(Error::ZeroGenerator(i));
                    }
                }
                Ok(())
            }
        }
    }

    /// Membership test `v` in the cone.
    ///
    /// Orthant and PSD are exact up to [`MEMBERSHIP_TOL`]; generator cones
    /// run a small nonnegative least-squares feasibility solve.
    pub fn contains(&self, v: &DVector<f64>) -> Result<bool> {
        match self {
            ConeSpec::Orthant => {
                let scale = v.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
                Ok(v.iter().all(|&c| c >= -MEMBERSHIP_TOL * scale))
            }
            ConeSpec::Psd { n } => {
                if n * n != v.len() {
                    return Err(Error::DimensionMismatch {
                        expected: n * n,
                        got: v.len(),
                    });
                }
                let h = herm::matrix_from_coords(*n, v.as_slice());
                let eigs = hermitian_eigenvalues(&h);
                let scale = eigs.iter().fold(1.0_f64, |m, l| m.max(l.abs()));
                Ok(eigs.iter().all(|&l| l >= -MEMBERSHIP_TOL * scale))
            }
            ConeSpec::Generators { rays } => {
                let dim = v.len();
                self.check_dim(dim)?;
                let mut a = DMatrix::zeros(dim, rays.len());
                for (j, ray) in rays.iter().enumerate() {
                    a.set_column(j, ray);
                }
                let x = nnls(&a, v)?;
                let residual = (&a * &x - v).norm();
                let scale = v.norm().max(1.0);
                Ok(residual <= MEMBERSHIP_TOL * scale)
            }
        }
    }

    /// Cone order: `u <= v` iff `v - u` is in the cone.
    pub fn le(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<bool> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                got: v.len(),
            });
        }
        self.contains(&(v - u))
    }
}

/// Symmetric bilinear form over the reference basis: the slice-region
/// null-probe value on a pair of boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicePairing {
    gram: DMatrix<f64>,
}

impl SlicePairing {
    pub fn new(gram: DMatrix<f64>) -> Result<Self> {
        let scale = gram.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
        let max_asymmetry = (&gram - gram.transpose())
            .iter()
            .map(|c| c.abs())
            .fold(0.0, f64::max);
        if max_asymmetry > 1e-12 * scale {
            return Err(Error::AsymmetricPairing { max_asymmetry });
        }
        // Store the exactly symmetrized matrix.
        let sym = (&gram + gram.transpose()) * 0.5;
        Ok(Self { gram: sym })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            gram: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_rows(dim: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: rows.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, rows))
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn eval(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (u.transpose() * &self.gram * v)[(0, 0)]
    }
}

/// Orthonormal basis for a slice pairing with signature signs:
/// `<b_k, b_l> = (-1)^{sigma(k)} delta_{kl}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedBasis {
    pub vectors: Vec<DVector<f64>>,
    /// 0 on the positive-definite part, 1 on the negative-definite part.
    pub signs: Vec<u8>,
}

impl SignedBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Number of negative-signature directions.
    pub fn negative_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s == 1).count()
    }

    /// Contraction kernel `K = sum_k (-1)^{sigma(k)} b_k b_k^T`.
    ///
    /// Composing probes through an interface contracts through this kernel;
    /// it is the inverse Gram matrix whenever the basis is valid, so the
    /// composite is independent of which valid basis produced it.
    pub fn contraction_kernel(&self) -> DMatrix<f64> {
        let dim = self.vectors[0].len();
        let mut k = DMatrix::zeros(dim, dim);
        for (b, &s) in self.vectors.iter().zip(&self.signs) {
            let sign = if s == 0 { 1.0 } else { -1.0 };
            k += (b * b.transpose()) * sign;
        }
        k
    }
}

/// A boundary-condition space: dimension, positive cone, slice pairing.
#[derive(Debug, Clone)]
pub struct BoundarySpaceSpec {
    pub dim: usize,
    pub cone: ConeSpec,
    pub pairing: SlicePairing,
    pub label: String,
}

impl BoundarySpaceSpec {
    pub fn new(
        dim: usize,
        cone: ConeSpec,
        pairing: SlicePairing,
        label: impl Into<String>,
    ) -> Result<Self> {
        if pairing.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: pairing.dim(),
            });
        }
        cone.check_dim(dim)?;
        Ok(Self {
            dim,
            cone,
            pairing,
            label: label.into(),
        })
    }

    pub fn pairing_eval(&self, u: &BcVector, v: &BcVector) -> Result<f64> {
        for w in [u, v] {
            if w.dim() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: w.dim(),
                });
            }
        }
        Ok(self.pairing.eval(&u.coords, &v.coords))
    }

    pub fn cone_contains(&self, v: &BcVector) -> Result<bool> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.dim(),
            });
        }
        self.cone.contains(&v.coords)
    }

    pub fn cone_le(&self, u: &BcVector, v: &BcVector) -> Result<bool> {
        if u.dim() != self.dim || v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.dim().max(v.dim()),
            });
        }
        self.cone.le(&u.coords, &v.coords)
    }

    /// Signed orthonormal basis of the pairing, positive-definite part first.
    ///
    /// Symmetric eigendecomposition of the Gram matrix; each eigenvector is
    /// scaled by `1/sqrt(|lambda|)` and signed by the eigenvalue sign.
    /// Fails with [`Error::DegeneratePairing`] if any eigenvalue magnitude
    /// falls below [`DEGENERACY_TOL`] relative to the largest.
    pub fn orthonormalize(&self) -> Result<SignedBasis> {
        let (eigenvalues, eigenvectors) = symmetric_eigen_sorted(self.pairing.gram());
        let max_abs = eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
        let tolerance = DEGENERACY_TOL * max_abs;
        let mut vectors = Vec::with_capacity(self.dim);
        let mut signs = Vec::with_capacity(self.dim);
        // Descending eigenvalue order puts the positive part first.
        for (lambda, vec) in eigenvalues.iter().zip(eigenvectors) {
            if max_abs == 0.0 || lambda.abs() <= tolerance {
                return Err(Error::DegeneratePairing {
                    eigenvalue: lambda.abs(),
                    tolerance,
                });
            }
            vectors.push(vec / lambda.abs().sqrt());
            signs.push(if *lambda > 0.0 { 0 } else { 1 });
        }
        Ok(SignedBasis { vectors, signs })
    }

    /// Checks that `basis` is orthonormal for this pairing within `tol`.
    pub fn validate_signed_basis(&self, basis: &SignedBasis, tol: f64) -> Result<()> {
        if basis.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: basis.len(),
            });
        }
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let got = self.pairing.eval(&basis.vectors[i], &basis.vectors[j]);
                let want = if i == j {
                    if basis.signs[i] == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    0.0
                };
                let deviation = (got - want).abs();
                if deviation > tol {
                    return Err(Error::InvalidSignedBasis { i, j, deviation });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herm;
    use approx::assert_abs_diff_eq;

    fn orthant_space(dim: usize) -> BoundarySpaceSpec {
        BoundarySpaceSpec::new(
            dim,
            ConeSpec::Orthant,
            SlicePairing::identity(dim),
            "orthant",
        )
        .unwrap()
    }

    #[test]
    fn orthant_membership() {
        let cone = ConeSpec::Orthant;
        assert!(cone.contains(&DVector::from_vec(vec![1.0, 2.0])).unwrap());
        assert!(!cone.contains(&DVector::from_vec(vec![-1.0, 2.0])).unwrap());
    }

    #[test]
    fn psd_membership_diagonal() {
        // diag(1,0) is PSD, diag(1,-0.5) is not: eigenvalues of a diagonal
        // matrix are its diagonal entries.
        let cone = ConeSpec::Psd { n: 2 };
        let diag_1_0 = herm::coords_of_matrix(&herm::diag(&[1.0, 0.0])).unwrap();
        let diag_1_neg = herm::coords_of_matrix(&herm::diag(&[1.0, -0.5])).unwrap();
        assert!(cone.contains(&DVector::from_vec(diag_1_0)).unwrap());
        assert!(!cone.contains(&DVector::from_vec(diag_1_neg)).unwrap());
    }

    #[test]
    fn psd_order_projector_below_identity() {
        // identity - diag(1,0) = diag(0,1), eigenvalues {0,1}.
        let cone = ConeSpec::Psd { n: 2 };
        let u = DVector::from_vec(herm::coords_of_matrix(&herm::diag(&[1.0, 0.0])).unwrap());
        let v = DVector::from_vec(herm::coords_of_matrix(&herm::diag(&[1.0, 1.0])).unwrap());
        assert!(cone.le(&u, &v).unwrap());
        assert!(!cone.le(&v, &u).unwrap());
    }

    #[test]
    fn orthant_order() {
        let cone = ConeSpec::Orthant;
        let u = DVector::from_vec(vec![1.0, 0.0]);
        let v = DVector::from_vec(vec![1.0, 1.0]);
        assert!(cone.le(&u, &v).unwrap());
        // u = v: the zero vector is in every cone.
        assert!(cone.le(&u, &u).unwrap());
    }

    #[test]
    fn generator_cone_membership() {
        let cone = ConeSpec::generators_from_rows(vec![vec![1.0, 0.0], vec![1.0, 1.0]]);
        assert!(cone.contains(&DVector::from_vec(vec![5.0, 3.0])).unwrap());
        assert!(!cone.contains(&DVector::from_vec(vec![0.0, 1.0])).unwrap());
        assert!(!cone.contains(&DVector::from_vec(vec![-1.0, 0.0])).unwrap());
    }

    #[test]
    fn generator_cone_rejects_zero_ray() {
        let cone = ConeSpec::generators_from_rows(vec![vec![0.0, 0.0]]);
        let err = BoundarySpaceSpec::new(2, cone, SlicePairing::identity(2), "bad").unwrap_err();
        assert!(matches!(err, Error::ZeroGenerator(0)));
    }

    #[test]
    fn pairing_eval_values() {
        let id = orthant_space(2);
        let e1 = BcVector::new(SpaceId(0), vec![1.0, 0.0]).unwrap();
        let e2 = BcVector::new(SpaceId(0), vec![0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(id.pairing_eval(&e1, &e1).unwrap(), 1.0);

        let space = BoundarySpaceSpec::new(
            2,
            ConeSpec::Orthant,
            SlicePairing::from_rows(2, &[2.0, 0.0, 0.0, -3.0]).unwrap(),
            "diag",
        )
        .unwrap();
        assert_abs_diff_eq!(space.pairing_eval(&e1, &e2).unwrap(), 0.0);
        assert_abs_diff_eq!(space.pairing_eval(&e2, &e2).unwrap(), -3.0);
    }

    #[test]
    fn pairing_rejects_asymmetry() {
        let err = SlicePairing::from_rows(2, &[1.0, 0.5, 0.2, 1.0]).unwrap_err();
        assert!(matches!(err, Error::AsymmetricPairing { .. }));
    }

    #[test]
    fn orthonormalize_identity_gram() {
        let space = orthant_space(2);
        let basis = space.orthonormalize().unwrap();
        assert_eq!(basis.signs, vec![0, 0]);
        space.validate_signed_basis(&basis, 1e-10).unwrap();
    }

    #[test]
    fn orthonormalize_indefinite_gram() {
        // gram = diag(2,-3): basis (1/sqrt(2), 0) with sign 0 and
        // (0, 1/sqrt(3)) with sign 1, up to eigenvector sign.
        let space = BoundarySpaceSpec::new(
            2,
            ConeSpec::Orthant,
            SlicePairing::from_rows(2, &[2.0, 0.0, 0.0, -3.0]).unwrap(),
            "diag",
        )
        .unwrap();
        let basis = space.orthonormalize().unwrap();
        assert_eq!(basis.signs, vec![0, 1]);
        assert_abs_diff_eq!(basis.vectors[0][0].abs(), 1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(basis.vectors[0][1].abs(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(basis.vectors[1][1].abs(), 1.0 / 3.0_f64.sqrt(), epsilon = 1e-12);
        space.validate_signed_basis(&basis, 1e-10).unwrap();
    }

    #[test]
    fn orthonormalize_degenerate_gram_fails() {
        let space = BoundarySpaceSpec::new(
            2,
            ConeSpec::Orthant,
            SlicePairing::from_rows(2, &[1.0, 0.0, 0.0, 0.0]).unwrap(),
            "degenerate",
        )
        .unwrap();
        assert!(matches!(
            space.orthonormalize(),
            Err(Error::DegeneratePairing { .. })
        ));
    }

    #[test]
    fn contraction_kernel_inverts_gram() {
        let space = BoundarySpaceSpec::new(
            2,
            ConeSpec::Orthant,
            SlicePairing::from_rows(2, &[2.0, 1.0, 1.0, -3.0]).unwrap(),
            "mixed",
        )
        .unwrap();
        let basis = space.orthonormalize().unwrap();
        let product = space.pairing.gram() * basis.contraction_kernel();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(product[(i, j)], want, epsilon = 1e-10);
            }
        }
    }
}
