//! Combinatorial spacetime: atoms, regions, gluings.
//!
//! Atoms stand in for boundary component hypersurfaces; a region is just its
//! ordered boundary decomposition. Everything downstream only consumes this
//! incidence data, so no manifold structure is kept.

use crate::space::SpaceId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GluingId(pub u32);

impl std::fmt::Display for AtomId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "atom#{}", self.0)
    }
}

impl std::fmt::Display for RegionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "region#{}", self.0)
    }
}

/// A boundary component hypersurface bound to a boundary-condition space.
#[derive(Debug, Clone)]
pub struct Atom {
    pub id: AtomId,
    pub label: String,
    pub space: SpaceId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    Elementary,
    /// Infinitesimally thin region over a single hypersurface; its two
    /// boundary atoms are bound to the same space.
    Slice,
    Composite,
}

/// A spacetime region with an ordered boundary decomposition.
#[derive(Debug, Clone)]
pub struct Region {
    pub id: RegionId,
    pub label: String,
    pub boundary: Vec<AtomId>,
    pub kind: RegionKind,
}

impl Region {
    pub fn arity(&self) -> usize {
        self.boundary.len()
    }

    pub fn boundary_position(&self, atom: AtomId) -> Option<usize> {
        self.boundary.iter().position(|&a| a == atom)
    }
}

/// Record of a gluing: which two regions were joined, along which atoms,
/// and the composite region that resulted.
#[derive(Debug, Clone)]
pub struct Gluing {
    pub id: GluingId,
    pub left: RegionId,
    pub right: RegionId,
    pub interface: Vec<AtomId>,
    pub composite: RegionId,
}
