//! Error types shared across the engine.

use thiserror::Error;

/// Errors produced by space registration, geometry construction, and probe
/// evaluation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry at position {index}")]
    NonFiniteEntry { index: usize },

    #[error("unknown space id {0}")]
    UnknownSpace(u32),

    #[error("unknown atom id {0}")]
    UnknownAtom(u32),

    #[error("unknown region id {0}")]
    UnknownRegion(u32),

    #[error("unknown gluing id {0}")]
    UnknownGluing(u32),

    #[error("repeated atom {0} in region boundary")]
    RepeatedAtom(u32),

    #[error("pairing matrix is not symmetric (max asymmetry {max_asymmetry:.3e})")]
    AsymmetricPairing { max_asymmetry: f64 },

    #[error("degenerate pairing: eigenvalue magnitude {eigenvalue:.3e} below tolerance {tolerance:.3e}")]
    DegeneratePairing { eigenvalue: f64, tolerance: f64 },

    #[error("proposed basis is not orthonormal for the pairing: |<b_{i}, b_{j}>| deviates by {deviation:.3e}")]
    InvalidSignedBasis { i: usize, j: usize, deviation: f64 },

    #[error("empty interface: regions {left} and {right} share no boundary atoms")]
    EmptyInterface { left: u32, right: u32 },

    #[error("cannot glue region {0} to itself")]
    SelfGluing(u32),

    #[error("cone generator list is empty")]
    EmptyGenerators,

    #[error("cone generator {0} is the zero vector")]
    ZeroGenerator(usize),

    #[error("PSD cone of rank {n} attached to a space of dimension {dim} (expected {})", n * n)]
    PsdDimension { n: usize, dim: usize },

    #[error("feasibility solver did not converge after {0} iterations")]
    FeasibilityNoConvergence(usize),

    #[error("boundary assignment is missing atom {0}")]
    MissingAssignment(u32),

    #[error("boundary assignment for atom {atom} lives in space {got}, expected {expected}")]
    SpaceMismatch { atom: u32, expected: u32, got: u32 },

    #[error("probe tensor shape {got:?} does not match region boundary dimensions {expected:?}")]
    TensorShapeMismatch { expected: Vec<usize>, got: Vec<usize> },

    #[error("probes live on different regions ({left} vs {right})")]
    RegionMismatch { left: u32, right: u32 },

    #[error("gluing {gluing} does not connect the probes' regions ({left}, {right})")]
    GluingMismatch { gluing: u32, left: u32, right: u32 },

    #[error("atom {0} is not on the probe's boundary")]
    AtomNotOnBoundary(u32),

    #[error("zero denominator: the general condition is incompatible with the region")]
    ZeroDenominator,

    #[error("ambiguous boundary: solutions {first} and {second} induce the same boundary tuple but different observable values")]
    AmbiguousBoundary { first: String, second: String },

    #[error("invalid state index {index} for a set of {size} states")]
    InvalidState { index: usize, size: usize },

    #[error("state set is empty")]
    EmptyStateSet,

    #[error("state set has duplicate label {0:?}")]
    DuplicateState(String),

    #[error("negative kernel entry {value:.3e} in a primitive probe")]
    NegativeKernelEntry { value: f64 },

    #[error("matrix is not self-adjoint (asymmetry {max_asymmetry:.3e})")]
    NotSelfAdjoint { max_asymmetry: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("Kraus operator {index} has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    KrausShape {
        index: usize,
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },

    #[error("empty Kraus set")]
    EmptyKrausSet,

    #[error("region has {got} boundary atoms, expected {expected}")]
    BoundaryArity { expected: usize, got: usize },

    #[error("no cached signed basis for space {0} (degenerate pairing)")]
    NoSignedBasis(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
