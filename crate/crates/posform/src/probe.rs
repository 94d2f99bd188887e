//! Probes: multilinear functionals on boundary conditions.
//!
//! A probe on a region is a coefficient tensor over the reference bases of
//! its boundary atoms' spaces. Evaluation contracts the tensor with one
//! boundary condition per atom. Composition across a gluing is the signed
//! sum over interface signed-basis elements; per interface atom this reduces
//! to contracting through the kernel `sum_k (-1)^{sigma(k)} b_k b_k^T`, so
//! glued probes see the interface only through its pairing.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::herm;
use crate::par;
use crate::space::{BcVector, ConeSpec, SpaceId, MEMBERSHIP_TOL};
use crate::spacetime::{AtomId, GluingId, RegionId};
use crate::tensor::Tensor;

/// A probe: region plus coefficient tensor, one index per boundary atom.
///
/// `primitive` is a claim that the probe takes nonnegative values on every
/// tuple of cone members (a YES/NO-type apparatus, unnormalized). The claim
/// is upheld by the backend constructors and propagated through composition;
/// it is spot-checked by the property suite, not proven per instance.
#[derive(Debug, Clone)]
pub struct Probe {
    pub region: RegionId,
    pub tensor: Tensor,
    pub primitive: bool,
}

impl Probe {
    /// Wraps a raw coefficient tensor after checking its shape against the
    /// region's boundary dimensions.
    pub fn from_tensor(ctx: &Context, region: RegionId, tensor: Tensor, primitive: bool) -> Result<Self> {
        let dims = ctx.boundary_dims(region)?;
        if tensor.shape() != dims.as_slice() {
            return Err(Error::TensorShapeMismatch {
                expected: dims,
                got: tensor.shape().to_vec(),
            });
        }
        Ok(Self {
            region,
            tensor,
            primitive,
        })
    }

    /// The trivial probe that values everything at zero.
    pub fn zero(ctx: &Context, region: RegionId) -> Result<Self> {
        let dims = ctx.boundary_dims(region)?;
        Ok(Self {
            region,
            tensor: Tensor::zeros(dims),
            primitive: true,
        })
    }

    /// Null-probe of a slice region: values a pair of boundary conditions at
    /// their slice pairing. Requires exactly two boundary atoms bound to the
    /// same space.
    ///
    /// Marked primitive only when the pairing is the identity Gram with an
    /// orthant or PSD cone (the shipped backends), where nonnegativity on
    /// cone pairs actually holds.
    pub fn slice_null(ctx: &Context, region: RegionId) -> Result<Self> {
        let r = ctx.region(region)?;
        if r.arity() != 2 {
            return Err(Error::BoundaryArity {
                expected: 2,
                got: r.arity(),
            });
        }
        let s0 = ctx.atom(r.boundary[0])?.space;
        let s1 = ctx.atom(r.boundary[1])?.space;
        if s0 != s1 {
            return Err(Error::SpaceMismatch {
                atom: r.boundary[1].0,
                expected: s0.0,
                got: s1.0,
            });
        }
        let space = ctx.space(s0)?;
        let dim = space.dim;
        let gram = space.pairing.gram();
        let data: Vec<f64> = (0..dim * dim).map(|f| gram[(f / dim, f % dim)]).collect();
        let identity_gram = (0..dim)
            .all(|i| (0..dim).all(|j| (gram[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs() == 0.0));
        let primitive = identity_gram
            && matches!(space.cone, ConeSpec::Orthant | ConeSpec::Psd { .. });
        Ok(Self {
            region,
            tensor: Tensor::from_data(vec![dim, dim], data)?,
            primitive,
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            region: self.region,
            tensor: self.tensor.scale(factor),
            primitive: self.primitive && factor >= 0.0,
        }
    }

    pub fn add(&self, other: &Probe) -> Result<Probe> {
        if self.region != other.region {
            return Err(Error::RegionMismatch {
                left: self.region.0,
                right: other.region.0,
            });
        }
        Ok(Probe {
            region: self.region,
            tensor: self.tensor.add(&other.tensor)?,
            primitive: self.primitive && other.primitive,
        })
    }

    pub fn sub(&self, other: &Probe) -> Result<Probe> {
        if self.region != other.region {
            return Err(Error::RegionMismatch {
                left: self.region.0,
                right: other.region.0,
            });
        }
        Ok(Probe {
            region: self.region,
            tensor: self.tensor.sub(&other.tensor)?,
            primitive: false,
        })
    }
}

/// Assignment of one boundary condition to each boundary atom of a region.
#[derive(Debug, Clone, Default)]
pub struct BoundaryAssignment {
    entries: Vec<(AtomId, BcVector)>,
}

impl BoundaryAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn of(pairs: impl IntoIterator<Item = (AtomId, BcVector)>) -> Self {
        Self {
            entries: pairs.into_iter().collect(),
        }
    }

    /// Inserts or replaces the condition on `atom`.
    pub fn insert(&mut self, atom: AtomId, bc: BcVector) {
        if let Some(slot) = self.entries.iter_mut().find(|(a, _)| *a == atom) {
            slot.1 = bc;
        } else {
            self.entries.push((atom, bc));
        }
    }

    pub fn with(mut self, atom: AtomId, bc: BcVector) -> Self {
        self.insert(atom, bc);
        self
    }

    pub fn get(&self, atom: AtomId) -> Option<&BcVector> {
        self.entries.iter().find(|(a, _)| *a == atom).map(|(_, b)| b)
    }

    /// Union of two assignments; `other` wins on shared atoms.
    pub fn merged(&self, other: &BoundaryAssignment) -> Self {
        let mut out = self.clone();
        for (a, b) in &other.entries {
            out.insert(*a, b.clone());
        }
        out
    }

    /// Coordinate vectors ordered by the region's boundary, with space and
    /// dimension checks.
    fn vectors_for(&self, ctx: &Context, region: RegionId) -> Result<Vec<DVector<f64>>> {
        let r = ctx.region(region)?;
        let mut out = Vec::with_capacity(r.arity());
        for &atom_id in &r.boundary {
            let atom = ctx.atom(atom_id)?;
            let bc = self
                .get(atom_id)
                .ok_or(Error::MissingAssignment(atom_id.0))?;
            if bc.space != atom.space {
                return Err(Error::SpaceMismatch {
                    atom: atom_id.0,
                    expected: atom.space.0,
                    got: bc.space.0,
                });
            }
            let dim = ctx.space(atom.space)?.dim;
            if bc.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: bc.dim(),
                });
            }
            out.push(bc.coords.clone());
        }
        Ok(out)
    }
}

/// The value of probe `p` under boundary assignment `b`: the multilinear
/// contraction of the coefficient tensor with the assigned coordinates.
pub fn evaluate(ctx: &Context, p: &Probe, b: &BoundaryAssignment) -> Result<f64> {
    let vectors = b.vectors_for(ctx, p.region)?;
    p.tensor.contract_all(&vectors)
}

/// Composes two probes across a gluing: the signed sum over interface
/// signed-basis elements, one independent sum per interface atom.
///
/// The result lives on the gluing's composite region; its tensor is bilinear
/// in the inputs and independent of which valid signed basis the interface
/// spaces carry.
pub fn compose(ctx: &Context, p: &Probe, q: &Probe, gluing: GluingId) -> Result<Probe> {
    let g = ctx.gluing(gluing)?;
    if p.region != g.left || q.region != g.right {
        return Err(Error::GluingMismatch {
            gluing: gluing.0,
            left: p.region.0,
            right: q.region.0,
        });
    }
    let left = ctx.region(g.left)?;
    let right = ctx.region(g.right)?;

    let mut axes_left = Vec::with_capacity(g.interface.len());
    let mut axes_right = Vec::with_capacity(g.interface.len());
    let mut contracted = p.tensor.clone();
    for &atom_id in &g.interface {
        let pos_left = left
            .boundary_position(atom_id)
            .ok_or(Error::AtomNotOnBoundary(atom_id.0))?;
        let pos_right = right
            .boundary_position(atom_id)
            .ok_or(Error::AtomNotOnBoundary(atom_id.0))?;
        let space_id = ctx.atom(atom_id)?.space;
        let basis = ctx.signed_basis(space_id)?;
        contracted = contracted.apply_matrix(pos_left, &basis.contraction_kernel())?;
        axes_left.push(pos_left);
        axes_right.push(pos_right);
    }
    let tensor = contracted.contract_pair(&axes_left, &q.tensor, &axes_right)?;
    Probe::from_tensor(ctx, g.composite, tensor, p.primitive && q.primitive)
}

/// Options for the sampled part of [`probe_le`] on PSD cones.
#[derive(Debug, Clone)]
pub struct LeOptions {
    /// Number of random pure-state projectors added per PSD space, on top of
    /// the fixed spanning set.
    pub psd_samples: usize,
    pub seed: u64,
    /// Slack allowed below zero, relative to the difference tensor's norm.
    pub tol: f64,
}

impl Default for LeOptions {
    fn default() -> Self {
        Self {
            psd_samples: 32,
            seed: 0x51CE_BA5E,
            tol: MEMBERSHIP_TOL,
        }
    }
}

/// Witness boundary conditions whose nonnegative hull is checked by
/// [`probe_le`].
///
/// For orthant and finitely generated cones these are the actual generators,
/// so the order test is exact by multilinearity. For PSD cones the witnesses
/// are a fixed spanning set of rank-one projectors plus seeded random pure
/// states: sound (a violation is a real violation) but incomplete.
pub fn order_witnesses(ctx: &Context, space_id: SpaceId, opts: &LeOptions) -> Result<Vec<BcVector>> {
    let space = ctx.space(space_id)?;
    let mut out = Vec::new();
    match &space.cone {
        ConeSpec::Orthant => {
            for i in 0..space.dim {
                let mut coords = vec![0.0; space.dim];
                coords[i] = 1.0;
                out.push(BcVector::new(space_id, coords)?);
            }
        }
        ConeSpec::Generators { rays } => {
            for ray in rays {
                let sup = ray.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
                out.push(BcVector {
                    space: space_id,
                    coords: ray / sup,
                });
            }
        }
        ConeSpec::Psd { n } => {
            let n = *n;
            let one = Complex64::new(1.0, 0.0);
            let imag = Complex64::new(0.0, 1.0);
            let norm = Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0);
            let mut projectors = Vec::new();
            for j in 0..n {
                let mut amp = vec![Complex64::default(); n];
                amp[j] = one;
                projectors.push(herm::projector(&amp));
            }
            for j in 0..n {
                for k in (j + 1)..n {
                    let mut real = vec![Complex64::default(); n];
                    real[j] = norm;
                    real[k] = norm;
                    projectors.push(herm::projector(&real));
                    let mut im = vec![Complex64::default(); n];
                    im[j] = norm;
                    im[k] = norm * imag;
                    projectors.push(herm::projector(&im));
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (space_id.0 as u64));
            for _ in 0..opts.psd_samples {
                projectors.push(random_pure_projector(&mut rng, n));
            }
            for proj in projectors {
                out.push(BcVector::new(space_id, herm::coords_of_matrix(&proj)?)?);
            }
        }
    }
    Ok(out)
}

fn random_pure_projector(rng: &mut ChaCha8Rng, n: usize) -> nalgebra::DMatrix<Complex64> {
    // Gaussian components via Box-Muller give a Haar-uniform direction.
    let mut amp = Vec::with_capacity(n);
    for _ in 0..n {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        amp.push(Complex64::new(
            r * (2.0 * std::f64::consts::PI * u2).cos(),
            r * (2.0 * std::f64::consts::PI * u2).sin(),
        ));
    }
    let norm: f64 = amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let amp: Vec<Complex64> = amp.into_iter().map(|z| z / norm).collect();
    herm::projector(&amp)
}

/// Probe order `p <= q`: the difference values every witness tuple
/// nonnegatively.
pub fn probe_le(ctx: &Context, p: &Probe, q: &Probe, opts: &LeOptions) -> Result<bool> {
    if p.region != q.region {
        return Err(Error::RegionMismatch {
            left: p.region.0,
            right: q.region.0,
        });
    }
    let diff = q.sub(p)?;
    let region = ctx.region(p.region)?;
    let mut witness_vectors: Vec<Vec<DVector<f64>>> = Vec::with_capacity(region.arity());
    for &atom_id in &region.boundary {
        let space_id = ctx.atom(atom_id)?.space;
        let ws = order_witnesses(ctx, space_id, opts)?;
        witness_vectors.push(ws.into_iter().map(|w| w.coords).collect());
    }
    let counts: Vec<usize> = witness_vectors.iter().map(|w| w.len()).collect();
    let total: usize = counts.iter().product();
    let scale = diff
        .tensor
        .data()
        .iter()
        .fold(1.0_f64, |m, v| m.max(v.abs()));
    let threshold = -opts.tol * scale;

    let ok = par::map_indexed(total, |mut flat| {
        let mut tuple = Vec::with_capacity(counts.len());
        for (count, ws) in counts.iter().zip(&witness_vectors).rev() {
            tuple.push(ws[flat % count].clone());
            flat /= count;
        }
        tuple.reverse();
        match diff.tensor.contract_all(&tuple) {
            Ok(v) => v >= threshold,
            Err(_) => false,
        }
    });
    Ok(ok.into_iter().all(|b| b))
}

/// Numerator, denominator, and quotient of a conditional formula.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub numerator: f64,
    pub denominator: f64,
    pub quotient: Option<f64>,
    /// Soft warnings (hierarchy or precondition violations); hard failures
    /// are errors instead.
    pub diagnostic: Option<String>,
}

impl QueryResult {
    fn from_ratio(numerator: f64, denominator: f64, zero_tol: f64) -> Result<Self> {
        if denominator.abs() <= zero_tol {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self {
            numerator,
            denominator,
            quotient: Some(numerator / denominator),
            diagnostic: None,
        })
    }

    fn flag(mut self, message: impl Into<String>) -> Self {
        let message = message.into();
        self.diagnostic = Some(match self.diagnostic.take() {
            Some(prev) => format!("{prev}; {message}"),
            None => message,
        });
        self
    }
}

const QUOTIENT_SLACK: f64 = 1e-9;

/// Conditional probability of the specific probe given the general one:
/// `(P_spec, b) / (P_gen, b)`.
///
/// Under the hierarchy `0 <= P_spec <= P_gen` and a cone boundary condition
/// the quotient lies in `[0, 1]`; a quotient outside that window is flagged
/// as a diagnostic. A vanishing denominator means `b` is incompatible with
/// the apparatus's presence and is an error.
pub fn cond_prob_probe(
    ctx: &Context,
    p_spec: &Probe,
    p_gen: &Probe,
    b: &BoundaryAssignment,
    zero_tol: f64,
) -> Result<QueryResult> {
    if p_spec.region != p_gen.region {
        return Err(Error::RegionMismatch {
            left: p_spec.region.0,
            right: p_gen.region.0,
        });
    }
    let numerator = evaluate(ctx, p_spec, b)?;
    let denominator = evaluate(ctx, p_gen, b)?;
    let mut result = QueryResult::from_ratio(numerator, denominator, zero_tol)?;
    let q = result.quotient.unwrap();
    if !(-QUOTIENT_SLACK..=1.0 + QUOTIENT_SLACK).contains(&q) {
        result = result.flag(format!(
            "quotient {q:.6e} outside [0,1]: hierarchy 0 <= specific <= general may not hold"
        ));
    }
    Ok(result)
}

/// Conditional probability that boundary condition `special` is realized
/// given `general`: `(P, c) / (P, b)`.
///
/// Meaningful when `P` is primitive and `special <= general` in the
/// componentwise cone order; violations are reported as diagnostics rather
/// than silently ignored.
pub fn cond_prob_boundary(
    ctx: &Context,
    p: &Probe,
    special: &BoundaryAssignment,
    general: &BoundaryAssignment,
    zero_tol: f64,
) -> Result<QueryResult> {
    let numerator = evaluate(ctx, p, special)?;
    let denominator = evaluate(ctx, p, general)?;
    let mut preconditions_hold = true;
    let mut notes = Vec::new();
    if !p.primitive {
        preconditions_hold = false;
        notes.push("probe is not primitive".to_owned());
    }
    let region = ctx.region(p.region)?;
    for &atom_id in &region.boundary {
        let atom = ctx.atom(atom_id)?;
        let space = ctx.space(atom.space)?;
        let c = special.get(atom_id).ok_or(Error::MissingAssignment(atom_id.0))?;
        let b = general.get(atom_id).ok_or(Error::MissingAssignment(atom_id.0))?;
        if !space.cone_le(c, b)? {
            preconditions_hold = false;
            notes.push(format!(
                "condition on {} is not a specialization of the general one",
                atom.label
            ));
        }
    }
    let mut result = QueryResult::from_ratio(numerator, denominator, zero_tol)?;
    for note in notes {
        result = result.flag(note);
    }
    if preconditions_hold {
        let q = result.quotient.unwrap();
        if !(-QUOTIENT_SLACK..=1.0 + QUOTIENT_SLACK).contains(&q) {
            result = result.flag(format!("quotient {q:.6e} outside [0,1]"));
        }
    }
    Ok(result)
}

/// Expectation value `(Q, b) / (Q_0, b)` where `Q_0` encodes the mere
/// presence of the apparatus. Unbounded; no range diagnostics.
pub fn expectation(
    ctx: &Context,
    q: &Probe,
    q0: &Probe,
    b: &BoundaryAssignment,
    zero_tol: f64,
) -> Result<QueryResult> {
    if q.region != q0.region {
        return Err(Error::RegionMismatch {
            left: q.region.0,
            right: q0.region.0,
        });
    }
    let numerator = evaluate(ctx, q, b)?;
    let denominator = evaluate(ctx, q0, b)?;
    QueryResult::from_ratio(numerator, denominator, zero_tol)
}

/// The boundary condition on `interface_atom` that reproduces `q`'s effect:
/// `q_bc = sum_k (-1)^{sigma(k)} b_k (Q, c_partial + b_k)`, so that
/// evaluating `Q` with any `x` on the interface equals `pairing(x, q_bc)`.
pub fn induced_boundary_condition(
    ctx: &Context,
    q: &Probe,
    c_partial: &BoundaryAssignment,
    interface_atom: AtomId,
) -> Result<BcVector> {
    let region = ctx.region(q.region)?;
    let pos = region
        .boundary_position(interface_atom)
        .ok_or(Error::AtomNotOnBoundary(interface_atom.0))?;
    let space_id = ctx.atom(interface_atom)?.space;
    let basis = ctx.signed_basis(space_id)?;

    // Contract every axis except the interface one.
    let mut t = q.tensor.clone();
    for k in (0..region.arity()).rev() {
        if k == pos {
            continue;
        }
        let atom_id = region.boundary[k];
        let atom = ctx.atom(atom_id)?;
        let bc = c_partial
            .get(atom_id)
            .ok_or(Error::MissingAssignment(atom_id.0))?;
        if bc.space != atom.space {
            return Err(Error::SpaceMismatch {
                atom: atom_id.0,
                expected: atom.space.0,
                got: bc.space.0,
            });
        }
        if k > pos {
            t = t.contract_last(&bc.coords)?;
        } else {
            t = t.contract_first(&bc.coords)?;
        }
    }
    debug_assert_eq!(t.rank(), 1);
    let values = DVector::from_column_slice(t.data());
    let coords = basis.contraction_kernel() * values;
    Ok(BcVector {
        space: space_id,
        coords,
    })
}
