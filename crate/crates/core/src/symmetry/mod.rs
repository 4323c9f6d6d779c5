//! Finite symmetry groups acting on open graphs, and the scattering matrices
//! of the resulting quotients.

pub mod action;
pub mod character;
pub mod group;
pub mod rep;

use thiserror::Error;

use crate::scattering::ScatteringError;

pub use action::{lead_permutation_matrices, validate_action, EdgeImage, GraphAction};
pub use character::{characters_equal, induced_character, ClassFunction};
pub use group::FiniteGroup;
pub use rep::{
    encoding_map, intertwiner_basis, quotient_scattering, quotient_scattering_sum, EncodingMap, MatrixRep, Quotient,
    QuotientBlock,
};

/// Tolerance for `P(g) S = S P(g)` and for the invariance of the encoded subspace.
pub const EQUIVARIANCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("element `{element}` maps edge `{edge}` to an edge of different length")]
    LengthViolation { element: String, edge: String },
    #[error("element `{element}` does not preserve the vertex condition at `{vertex}`")]
    ConditionViolation { element: String, vertex: String },
    #[error("the graph has internal edges but the action gives no edge permutations")]
    MissingEdgeAction,
    #[error("encoding vectors are linearly dependent")]
    DependentColumns,
    #[error("representation is not irreducible (<χ,χ> = {0:.6})")]
    NotIrreducible(f64),
    #[error("scattering matrix does not commute with the action (defect {0:.3e})")]
    NotEquivariant(f64),
    #[error("encoded subspace is not invariant under S (residual {0:.3e})")]
    NotInvariant(f64),
    #[error("elements do not form a subgroup: {0}")]
    NotSubgroup(String),
    #[error("class functions belong to different groups")]
    GroupMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown group element `{0}`")]
    UnknownElement(String),
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
}
