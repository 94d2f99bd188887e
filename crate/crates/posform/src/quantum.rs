//! Quantum backend: boundary spaces of self-adjoint operators.
//!
//! Boundary conditions on a hypersurface are self-adjoint operators on an
//! `n`-dimensional Hilbert space, coordinatized in the trace-orthonormal
//! reference basis of [`crate::herm`]. The positive cone is PSD, the slice
//! pairing is Hilbert-Schmidt (identity Gram, all signs positive), and
//! primitive probes arise from unnormalized quantum operations given by
//! Kraus sets.
//!
//! Value convention for a two-boundary region with boundary `(in, out)`:
//! `(P, (rho, E)) = tr(E * channel(rho))`, i.e. the first boundary atom is
//! the initial one.

use num_complex::Complex64;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::herm;
use crate::linalg::{hermitian_eigenvalues, require_self_adjoint, trace_product, CMatrix};
use crate::par;
use crate::probe::Probe;
use crate::space::{BcVector, BoundarySpaceSpec, ConeSpec, SlicePairing, SpaceId};
use crate::spacetime::RegionId;
use crate::tensor::Tensor;

const UNITARY_TOL: f64 = 1e-10;
const TP_TOL: f64 = 1e-10;

/// A registered quantum boundary space: self-adjoint operators on an
/// `n`-dimensional Hilbert space, with coordinate conversions.
#[derive(Debug, Clone, Copy)]
pub struct HermitianSpace {
    id: SpaceId,
    n: usize,
}

/// Registers the space of self-adjoint operators on an `n`-dimensional
/// Hilbert space: dimension `n^2`, PSD cone, identity Gram.
pub fn qm_space(ctx: &mut Context, n: usize) -> HermitianSpace {
    assert!(n >= 1, "Hilbert space dimension must be positive");
    let dim = n * n;
    let spec = BoundarySpaceSpec::new(
        dim,
        ConeSpec::Psd { n },
        SlicePairing::identity(dim),
        format!("qm({n})"),
    )
    .expect("PSD cone over n^2 dimensions is always consistent");
    let id = ctx.add_space(spec);
    HermitianSpace { id, n }
}

/// Coordinates of a state together with its physicality checks.
#[derive(Debug, Clone)]
pub struct StateBc {
    pub bc: BcVector,
    /// Whether the operator is positive semidefinite (within tolerance).
    pub psd: bool,
    pub trace: f64,
}

impl HermitianSpace {
    pub fn id(&self) -> SpaceId {
        self.id
    }

    pub fn hilbert_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    /// Coordinates of a self-adjoint operator in the reference basis.
    pub fn bc_from_matrix(&self, a: &CMatrix) -> Result<BcVector> {
        if a.nrows() != self.n || a.ncols() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: a.nrows().max(a.ncols()),
            });
        }
        BcVector::new(self.id, herm::coords_of_matrix(a)?)
    }

    /// State (initial) boundary condition: checks self-adjointness, flags
    /// non-PSD inputs, and records the trace.
    pub fn state_bc(&self, rho: &CMatrix) -> Result<StateBc> {
        let bc = self.bc_from_matrix(rho)?;
        let eigs = hermitian_eigenvalues(rho);
        let scale = eigs.iter().fold(1.0_f64, |m, l| m.max(l.abs()));
        let psd = eigs.iter().all(|&l| l >= -1e-9 * scale);
        Ok(StateBc {
            bc,
            psd,
            trace: rho.trace().re,
        })
    }

    /// Effect (final) boundary condition.
    pub fn effect_bc(&self, e: &CMatrix) -> Result<BcVector> {
        self.bc_from_matrix(e)
    }

    /// Reconstructs the operator from reference-basis coordinates.
    pub fn matrix_of(&self, bc: &BcVector) -> Result<CMatrix> {
        if bc.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: bc.dim(),
            });
        }
        Ok(herm::matrix_from_coords(self.n, bc.coords.as_slice()))
    }
}

/// A set of Kraus operators describing an (unnormalized) quantum operation
/// from an `n_in`- to an `n_out`-dimensional system.
#[derive(Debug, Clone)]
pub struct KrausSet {
    mats: Vec<CMatrix>,
    trace_preserving: bool,
}

impl KrausSet {
    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        let first = mats.first().ok_or(Error::EmptyKrausSet)?;
        let (rows, cols) = (first.nrows(), first.ncols());
        for (index, k) in mats.iter().enumerate() {
            if k.nrows() != rows || k.ncols() != cols {
                return Err(Error::KrausShape {
                    index,
                    rows: k.nrows(),
                    cols: k.ncols(),
                    expected_rows: rows,
                    expected_cols: cols,
                });
            }
        }
        let mut sum = CMatrix::zeros(cols, cols);
        for k in &mats {
            sum += k.adjoint() * k;
        }
        let deviation = (&sum - CMatrix::identity(cols, cols))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        Ok(Self {
            mats,
            trace_preserving: deviation <= TP_TOL,
        })
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.mats
    }

    /// Whether `sum_k K_k^dagger K_k = 1` holds within tolerance.
    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    pub fn n_in(&self) -> usize {
        self.mats[0].ncols()
    }

    pub fn n_out(&self) -> usize {
        self.mats[0].nrows()
    }

    /// Applies the operation to a density operator.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.n_out(), self.n_out());
        for k in &self.mats {
            out += k * rho * k.adjoint();
        }
        out
    }
}

fn two_boundary_dims(ctx: &Context, region: RegionId) -> Result<(usize, usize)> {
    let dims = ctx.boundary_dims(region)?;
    if dims.len() != 2 {
        return Err(Error::BoundaryArity {
            expected: 2,
            got: dims.len(),
        });
    }
    Ok((dims[0], dims[1]))
}

/// Probe of an unnormalized quantum operation on a two-boundary region
/// `(in, out)`: `T[i, j] = tr(B^out_j sum_k K_k B^in_i K_k^dagger)`.
///
/// Complete positivity makes the value nonnegative on PSD pairs, so the
/// probe is primitive.
pub fn probe_from_kraus(ctx: &Context, region: RegionId, ks: &KrausSet) -> Result<Probe> {
    let (dim_in, dim_out) = two_boundary_dims(ctx, region)?;
    let (n_in, n_out) = (ks.n_in(), ks.n_out());
    if n_in * n_in != dim_in {
        return Err(Error::DimensionMismatch {
            expected: dim_in,
            got: n_in * n_in,
        });
    }
    if n_out * n_out != dim_out {
        return Err(Error::DimensionMismatch {
            expected: dim_out,
            got: n_out * n_out,
        });
    }
    let basis_in = herm::basis(n_in);
    let basis_out = herm::basis(n_out);
    // Channel images of the input basis, then one trace per tensor entry.
    let images = par::map_indexed(dim_in, |i| ks.apply(&basis_in[i]));
    let tensor = Tensor::from_fn(vec![dim_in, dim_out], |idx| {
        trace_product(&basis_out[idx[1]], &images[idx[0]]).re
    });
    Probe::from_tensor(ctx, region, tensor, true)
}

/// Null-probe of a quantum "time interval" region: the unitary channel for
/// the given dynamics, or the identity channel when none is given.
pub fn null_probe(ctx: &Context, region: RegionId, dynamics: Option<&CMatrix>) -> Result<Probe> {
    let (dim_in, _) = two_boundary_dims(ctx, region)?;
    let n = (dim_in as f64).sqrt().round() as usize;
    let u = match dynamics {
        Some(u) => {
            let deviation = (u.adjoint() * u - CMatrix::identity(u.nrows(), u.ncols()))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if u.nrows() != n || u.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: u.nrows(),
                });
            }
            if deviation > UNITARY_TOL {
                return Err(Error::NotUnitary { deviation });
            }
            u.clone()
        }
        None => CMatrix::identity(n, n),
    };
    probe_from_kraus(ctx, region, &KrausSet::new(vec![u])?)
}

/// Probe reading out a self-adjoint observable alongside trivial dynamics:
/// `rho -> (A rho + rho A) / 2`, so that conditioning on the identity final
/// condition yields `tr(A rho)`.
pub fn observable_probe(ctx: &Context, region: RegionId, observable: &CMatrix) -> Result<Probe> {
    let (dim_in, dim_out) = two_boundary_dims(ctx, region)?;
    if dim_in != dim_out {
        return Err(Error::DimensionMismatch {
            expected: dim_in,
            got: dim_out,
        });
    }
    let n = (dim_in as f64).sqrt().round() as usize;
    if observable.nrows() != n || observable.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: observable.nrows(),
        });
    }
    require_self_adjoint(observable, 1e-10)?;
    let basis = herm::basis(n);
    let tensor = Tensor::from_fn(vec![dim_in, dim_out], |idx| {
        let jordan = (observable * &basis[idx[0]] + &basis[idx[0]] * observable).scale(0.5);
        trace_product(&basis[idx[1]], &jordan).re
    });
    Probe::from_tensor(ctx, region, tensor, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::{cond_prob_probe, evaluate, expectation, BoundaryAssignment};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ket0_proj() -> CMatrix {
        herm::projector(&[c(1.0, 0.0), c(0.0, 0.0)])
    }

    fn ket1_proj() -> CMatrix {
        herm::projector(&[c(0.0, 0.0), c(1.0, 0.0)])
    }

    fn plus_proj() -> CMatrix {
        let h = 1.0 / 2.0_f64.sqrt();
        herm::projector(&[c(h, 0.0), c(h, 0.0)])
    }

    fn hadamard() -> CMatrix {
        let h = 1.0 / 2.0_f64.sqrt();
        CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
    }

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    fn pauli_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }

    /// Context with one qubit space and a two-boundary region over it.
    fn qubit_region() -> (Context, HermitianSpace, crate::spacetime::AtomId, crate::spacetime::AtomId, RegionId) {
        let mut ctx = Context::new();
        let hs = qm_space(&mut ctx, 2);
        let a_in = ctx.add_atom("in", hs.id()).unwrap();
        let a_out = ctx.add_atom("out", hs.id()).unwrap();
        let r = ctx.add_region("interval", &[a_in, a_out]).unwrap();
        (ctx, hs, a_in, a_out, r)
    }

    #[test]
    fn qm_space_dimensions() {
        let mut ctx = Context::new();
        let s1 = qm_space(&mut ctx, 1);
        assert_eq!(ctx.space(s1.id()).unwrap().dim, 1);
        let s3 = qm_space(&mut ctx, 3);
        let spec = ctx.space(s3.id()).unwrap();
        assert_eq!(spec.dim, 9);
        // Hilbert-Schmidt Gram is the identity by construction.
        for i in 0..9 {
            for j in 0..9 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(spec.pairing.gram()[(i, j)], want);
            }
        }
    }

    #[test]
    fn orthogonal_projectors_pair_to_zero() {
        let mut ctx = Context::new();
        let hs = qm_space(&mut ctx, 2);
        let spec = ctx.space(hs.id()).unwrap();
        let b0 = hs.effect_bc(&ket0_proj()).unwrap();
        let b1 = hs.effect_bc(&ket1_proj()).unwrap();
        // tr(|0><0| |1><1|) = 0.
        assert_abs_diff_eq!(spec.pairing_eval(&b0, &b1).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.pairing_eval(&b0, &b0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn identity_channel_probe_is_trace_pairing() {
        let (ctx, hs, a_in, a_out, r) = qubit_region();
        let probe = null_probe(&ctx, r, None).unwrap();
        let b = BoundaryAssignment::of([
            (a_in, hs.state_bc(&ket0_proj()).unwrap().bc),
            (a_out, hs.effect_bc(&ket0_proj()).unwrap()),
        ]);
        assert_abs_diff_eq!(evaluate(&ctx, &probe, &b).unwrap(), 1.0, epsilon = 1e-12);

        // tr(|+><+| |0><0|) = 1/2.
        let b_plus = BoundaryAssignment::of([
            (a_in, hs.state_bc(&ket0_proj()).unwrap().bc),
            (a_out, hs.effect_bc(&plus_proj()).unwrap()),
        ]);
        assert_abs_diff_eq!(evaluate(&ctx, &probe, &b_plus).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn hadamard_maps_zero_to_plus() {
        let (ctx, hs, a_in, a_out, r) = qubit_region();
        let probe = probe_from_kraus(&ctx, r, &KrausSet::new(vec![hadamard()]).unwrap()).unwrap();
        let b = BoundaryAssignment::of([
            (a_in, hs.state_bc(&ket0_proj()).unwrap().bc),
            (a_out, hs.effect_bc(&plus_proj()).unwrap()),
        ]);
        assert_abs_diff_eq!(evaluate(&ctx, &probe, &b).unwrap(), 1.0, epsilon = 1e-11);
    }

    #[test]
    fn dephasing_halves_coherence() {
        let (ctx, hs, a_in, a_out, r) = qubit_region();
        let ks = KrausSet::new(vec![ket0_proj(), ket1_proj()]).unwrap();
        assert!(ks.is_trace_preserving());
        let probe = probe_from_kraus(&ctx, r, &ks).unwrap();
        let b = BoundaryAssignment::of([
            (a_in, hs.state_bc(&plus_proj()).unwrap().bc),
            (a_out, hs.effect_bc(&plus_proj()).unwrap()),
        ]);
        // Dephasing sends |+><+| to 1/2, and tr(|+><+| 1/2) = 1/2.
        assert_abs_diff_eq!(evaluate(&ctx, &probe, &b).unwrap(), 0.5, epsilon = 1e-11);
    }

    #[test]
    fn state_bc_of_maximally_mixed() {
        let mut ctx = Context::new();
        let hs = qm_space(&mut ctx, 2);
        let rho = herm::diag(&[0.5, 0.5]);
        let state = hs.state_bc(&rho).unwrap();
        // tr(B_0 1/2) with B_0 = 1/sqrt(2): coordinates (1/sqrt(2), 0, 0, 0).
        assert_abs_diff_eq!(state.bc.coords[0], 1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
        for k in 1..4 {
            assert_abs_diff_eq!(state.bc.coords[k], 0.0, epsilon = 1e-12);
        }
        assert!(state.psd);
        assert_abs_diff_eq!(state.trace, 1.0);
        assert!(ctx.space(hs.id()).unwrap().cone_contains(&state.bc).unwrap());
    }

    #[test]
    fn projector_is_in_the_psd_cone() {
        let mut ctx = Context::new();
        let hs = qm_space(&mut ctx, 2);
        let bc = hs.state_bc(&ket0_proj()).unwrap();
        assert!(bc.psd);
        assert!(ctx.space(hs.id()).unwrap().cone_contains(&bc.bc).unwrap());
    }

    #[test]
    fn pauli_x_is_self_adjoint_but_not_psd() {
        let mut ctx = Context::new();
        let hs = qm_space(&mut ctx, 2);
        // Eigenvalues of X are +1 and -1.
        let state = hs.state_bc(&pauli_x()).unwrap();
        assert!(!state.psd);
        assert!(!ctx.space(hs.id()).unwrap().cone_contains(&state.bc).unwrap());
    }

    #[test]
    fn state_bc_rejects_non_self_adjoint() {
        let mut ctx = Context::new();
        let hs = qm_space(&mut ctx, 2);
        let bad = CMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        );
        assert!(matches!(
            hs.state_bc(&bad),
            Err(Error::NotSelfAdjoint { .. })
        ));
    }

    #[test]
    fn null_probe_conserves_trace() {
        let (ctx, hs, a_in, a_out, r) = qubit_region();
        let identity_final = hs.effect_bc(&CMatrix::identity(2, 2)).unwrap();
        let rho = herm::diag(&[0.3, 0.7]);
        for dynamics in [None, Some(hadamard()), Some(pauli_x())] {
            let probe = null_probe(&ctx, r, dynamics.as_ref()).unwrap();
            let b = BoundaryAssignment::of([
                (a_in, hs.state_bc(&rho).unwrap().bc),
                (a_out, identity_final.clone()),
            ]);
            assert_abs_diff_eq!(evaluate(&ctx, &probe, &b).unwrap(), 1.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn null_probe_rejects_non_unitary() {
        let (ctx, _hs, _a_in, _a_out, r) = qubit_region();
        let not_unitary = herm::diag(&[1.0, 0.5]);
        assert!(matches!(
            null_probe(&ctx, r, Some(&not_unitary)),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn x_gate_flips_zero_to_one() {
        let (ctx, hs, a_in, a_out, r) = qubit_region();
        let probe = null_probe(&ctx, r, Some(&pauli_x())).unwrap();
        let b = BoundaryAssignment::of([
            (a_in, hs.state_bc(&ket0_proj()).unwrap().bc),
            (a_out, hs.effect_bc(&ket1_proj()).unwrap()),
        ]);
        assert_abs_diff_eq!(evaluate(&ctx, &probe, &b).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn born_rule_from_conditional_probability() {
        let (ctx, hs, a_in, a_out, r) = qubit_region();
        // Specific: effect |0><0| after trivial dynamics. General: presence.
        let spec_probe =
            probe_from_kraus(&ctx, r, &KrausSet::new(vec![ket0_proj()]).unwrap()).unwrap();
        let presence = null_probe(&ctx, r, None).unwrap();
        let b = BoundaryAssignment::of([
            (a_in, hs.state_bc(&plus_proj()).unwrap().bc),
            (a_out, hs.effect_bc(&CMatrix::identity(2, 2)).unwrap()),
        ]);
        let res = cond_prob_probe(&ctx, &spec_probe, &presence, &b, 0.0).unwrap();
        // |<0|+>|^2 = 1/2, and the presence denominator is exactly 1.
        assert_abs_diff_eq!(res.quotient.unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(res.denominator, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn z_observable_expectation() {
        let (ctx, hs, a_in, a_out, r) = qubit_region();
        let q = observable_probe(&ctx, r, &pauli_z()).unwrap();
        let q0 = null_probe(&ctx, r, None).unwrap();
        let identity_final = hs.effect_bc(&CMatrix::identity(2, 2)).unwrap();
        let from_zero = BoundaryAssignment::of([
            (a_in, hs.state_bc(&ket0_proj()).unwrap().bc),
            (a_out, identity_final.clone()),
        ]);
        assert_abs_diff_eq!(
            expectation(&ctx, &q, &q0, &from_zero, 0.0).unwrap().quotient.unwrap(),
            1.0,
            epsilon = 1e-11
        );
        let from_plus = BoundaryAssignment::of([
            (a_in, hs.state_bc(&plus_proj()).unwrap().bc),
            (a_out, identity_final),
        ]);
        assert_abs_diff_eq!(
            expectation(&ctx, &q, &q0, &from_plus, 0.0).unwrap().quotient.unwrap(),
            0.0,
            epsilon = 1e-11
        );
    }

    #[test]
    fn kraus_set_validation() {
        assert!(matches!(KrausSet::new(vec![]), Err(Error::EmptyKrausSet)));
        let mismatched = vec![hadamard(), CMatrix::identity(3, 3)];
        assert!(matches!(
            KrausSet::new(mismatched),
            Err(Error::KrausShape { index: 1, .. })
        ));
        // Non-trace-preserving sets are allowed, just flagged.
        let half = KrausSet::new(vec![ket0_proj()]).unwrap();
        assert!(!half.is_trace_preserving());
    }

    #[test]
    fn unitary_probes_compose_to_product_channel() {
        let mut ctx = Context::new();
        let hs = qm_space(&mut ctx, 2);
        let a = ctx.add_atom("a", hs.id()).unwrap();
        let b_atom = ctx.add_atom("b", hs.id()).unwrap();
        let c_atom = ctx.add_atom("c", hs.id()).unwrap();
        let m = ctx.add_region("m", &[a, b_atom]).unwrap();
        let n = ctx.add_region("n", &[b_atom, c_atom]).unwrap();
        let u1 = hadamard();
        let u2 = pauli_x();
        let p1 = null_probe(&ctx, m, Some(&u1)).unwrap();
        let p2 = null_probe(&ctx, n, Some(&u2)).unwrap();
        let (composite, gluing) = ctx.glue(m, n).unwrap();
        let composed = crate::probe::compose(&ctx, &p1, &p2, gluing).unwrap();

        // Oracle: the single probe of the product unitary U2 U1, computed by
        // direct matrix arithmetic.
        let product = &u2 * &u1;
        let direct = null_probe(&ctx, composite, Some(&product)).unwrap();
        assert!(composed.tensor.max_abs_diff(&direct.tensor) <= 1e-10);
        assert!(composed.primitive);
    }
}
