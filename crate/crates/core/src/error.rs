use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into input problems (bad shapes, points off the lattice,
/// non-Gorenstein fans) and `Internal`, which marks a violated invariant
/// such as a negative delta entry or a failed symmetry check.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("generators do not span a full-rank lattice (rank {rank} < {dim})")]
    NotFullRank { rank: usize, dim: usize },

    #[error("point {point} is not in the lattice")]
    NotInLattice { point: String },

    #[error("point set is not full-dimensional (affine dimension {affine_dim} < {dim})")]
    NotFullDimensional { affine_dim: usize, dim: usize },

    #[error("origin is not in the interior of the polytope")]
    OriginNotInterior,

    #[error("polar polytope has a vertex {vertex} outside the dual lattice")]
    PolarNotLattice { vertex: String },

    #[error("polytope is not reflexive: {reason}")]
    NotReflexive { reason: String },

    #[error("mismatched truncation orders {left} and {right}")]
    TruncationMismatch { left: usize, right: usize },

    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("not Gorenstein (no support function) on cone {cone}")]
    NoSupportFunction { cone: usize },

    #[error("not Gorenstein (non-integral) on cone {cone}: u = {u}")]
    NonIntegralSupport { cone: usize, u: String },

    #[error("not Ehrhart-consistent: {0}")]
    NotEhrhartConsistent(String),

    #[error("invalid triangulation input: {0}")]
    InvalidTriangulation(String),

    #[error("face {0:?} is not a face of the triangulation")]
    UnknownFace(Vec<usize>),

    #[error("value out of range: {0}")]
    Overflow(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
