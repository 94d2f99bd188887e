//! Append-only registry of spaces, atoms, regions, and gluings.
//!
//! Construction is single-writer; once built, a [`Context`] is read-only and
//! freely shareable across threads. Signed orthonormal bases are cached per
//! space at registration time and reused by every composition.

use crate::error::{Error, Result};
use crate::space::{BoundarySpaceSpec, SignedBasis, SpaceId};
use crate::spacetime::{Atom, AtomId, Gluing, GluingId, Region, RegionId, RegionKind};

#[derive(Debug, Default)]
pub struct Context {
    spaces: Vec<BoundarySpaceSpec>,
    bases: Vec<Option<SignedBasis>>,
    atoms: Vec<Atom>,
    regions: Vec<Region>,
    gluings: Vec<Gluing>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a space and caches its signed basis. A degenerate pairing
    /// is allowed here; composition through such a space fails later with
    /// [`Error::NoSignedBasis`].
    pub fn add_space(&mut self, spec: BoundarySpaceSpec) -> SpaceId {
        let id = SpaceId(self.spaces.len() as u32);
        self.bases.push(spec.orthonormalize().ok());
        self.spaces.push(spec);
        id
    }

    pub fn space(&self, id: SpaceId) -> Result<&BoundarySpaceSpec> {
        self.spaces
            .get(id.0 as usize)
            .ok_or(Error::UnknownSpace(id.0))
    }

    pub fn spaces(&self) -> impl Iterator<Item = (SpaceId, &BoundarySpaceSpec)> {
        self.spaces
            .iter()
            .enumerate()
            .map(|(i, s)| (SpaceId(i as u32), s))
    }

    /// Cached signed basis of the space's pairing.
    pub fn signed_basis(&self, id: SpaceId) -> Result<&SignedBasis> {
        self.space(id)?;
        self.bases[id.0 as usize]
            .as_ref()
            .ok_or(Error::NoSignedBasis(id.0))
    }

    /// Replaces the cached signed basis after validating the orthonormality
    /// property. Any valid basis yields the same compositions; this exists
    /// so that independence can be exercised and tested.
    pub fn set_signed_basis(&mut self, id: SpaceId, basis: SignedBasis) -> Result<()> {
        let space = self.space(id)?;
        space.validate_signed_basis(&basis, 1e-10)?;
        self.bases[id.0 as usize] = Some(basis);
        Ok(())
    }

    pub fn add_atom(&mut self, label: impl Into<String>, space: SpaceId) -> Result<AtomId> {
        self.space(space)?;
        let id = AtomId(self.atoms.len() as u32);
        self.atoms.push(Atom {
            id,
            label: label.into(),
            space,
        });
        Ok(id)
    }

    pub fn atom(&self, id: AtomId) -> Result<&Atom> {
        self.atoms.get(id.0 as usize).ok_or(Error::UnknownAtom(id.0))
    }

    /// New elementary region with the given boundary decomposition.
    pub fn add_region(&mut self, label: impl Into<String>, boundary: &[AtomId]) -> Result<RegionId> {
        for (i, &a) in boundary.iter().enumerate() {
            self.atom(a)?;
            if boundary[..i].contains(&a) {
                return Err(Error::RepeatedAtom(a.0));
            }
        }
        Ok(self.push_region(label.into(), boundary.to_vec(), RegionKind::Elementary))
    }

    pub fn region(&self, id: RegionId) -> Result<&Region> {
        self.regions
            .get(id.0 as usize)
            .ok_or(Error::UnknownRegion(id.0))
    }

    pub fn gluing(&self, id: GluingId) -> Result<&Gluing> {
        self.gluings
            .get(id.0 as usize)
            .ok_or(Error::UnknownGluing(id.0))
    }

    /// The slice region over `atom`: an infinitesimally thin region whose
    /// boundary is `(atom, mirror)` with the mirror bound to the same space.
    pub fn slice(&mut self, atom: AtomId) -> Result<RegionId> {
        let base = self.atom(atom)?.clone();
        let mirror = self.add_atom(format!("{}'", base.label), base.space)?;
        Ok(self.push_region(
            format!("slice({})", base.label),
            vec![atom, mirror],
            RegionKind::Slice,
        ))
    }

    /// Glues two regions along every boundary atom they share.
    ///
    /// The composite boundary keeps the left region's remaining atoms in
    /// order, then the right region's. Disjoint regions are rejected:
    /// gluing is only defined along a common interface.
    pub fn glue(&mut self, left: RegionId, right: RegionId) -> Result<(RegionId, GluingId)> {
        if left == right {
            return Err(Error::SelfGluing(left.0));
        }
        let m = self.region(left)?.clone();
        let n = self.region(right)?.clone();
        let interface: Vec<AtomId> = m
            .boundary
            .iter()
            .copied()
            .filter(|a| n.boundary.contains(a))
            .collect();
        if interface.is_empty() {
            return Err(Error::EmptyInterface {
                left: left.0,
                right: right.0,
            });
        }
        let mut boundary: Vec<AtomId> = m
            .boundary
            .iter()
            .copied()
            .filter(|a| !interface.contains(a))
            .collect();
        boundary.extend(n.boundary.iter().copied().filter(|a| !interface.contains(a)));
        let composite = self.push_region(
            format!("{}+{}", m.label, n.label),
            boundary,
            RegionKind::Composite,
        );
        let gid = GluingId(self.gluings.len() as u32);
        self.gluings.push(Gluing {
            id: gid,
            left,
            right,
            interface,
            composite,
        });
        Ok((composite, gid))
    }

    /// Dimensions of the boundary atoms' spaces, in boundary order. This is
    /// the shape a probe tensor on the region must have.
    pub fn boundary_dims(&self, region: RegionId) -> Result<Vec<usize>> {
        let r = self.region(region)?;
        r.boundary
            .iter()
            .map(|&a| Ok(self.space(self.atom(a)?.space)?.dim))
            .collect()
    }

    fn push_region(&mut self, label: String, boundary: Vec<AtomId>, kind: RegionKind) -> RegionId {
        let id = RegionId(self.regions.len() as u32);
        self.regions.push(Region {
            id,
            label,
            boundary,
            kind,
        });
        id
    }
}
