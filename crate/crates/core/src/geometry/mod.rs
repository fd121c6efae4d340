//! Halfspace polytopes, their face lattices, angles and normal cones.

mod angles;
mod dd;
mod faces;
mod perturb;
mod polytope;
pub mod shapes;

pub use angles::{are_adjacent, coangle, complementary_angle, Coangle, CoangleMethod, NormalCone};
pub use faces::{enumerate_faces, Face, FaceLattice};
pub use perturb::{is_simple, perturb_to_simple};
pub use polytope::{HPolytope, Halfspace, DEFAULT_TOLERANCE};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("Unbounded: the halfspaces do not bound a compact region")]
    Unbounded,
    #[error("Degenerate: the polytope is not full-dimensional")]
    Degenerate,
    #[error("Empty: the halfspaces have no common point")]
    Empty,
    #[error("DimensionMismatch: expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("TooFewHalfspaces: dimension {dim} needs at least {} halfspaces, found {found}", dim + 1)]
    TooFewHalfspaces { dim: usize, found: usize },
    #[error("InvalidHalfspace: halfspace {0} has a zero or non-finite normal or offset")]
    InvalidHalfspace(usize),
    #[error("InvalidTolerance: {0}")]
    InvalidTolerance(f64),
    #[error("InvalidFacet: no facet with id {0}")]
    InvalidFacet(usize),
    #[error("InvalidFace: no face with id {0}")]
    InvalidFace(usize),
    #[error("ToleranceConflict: {0}")]
    ToleranceConflict(String),
    #[error("NotAdjacent: facets {0} and {1} do not share an (n-2)-face")]
    NotAdjacent(usize, usize),
    #[error("UnsupportedDimension: {0}")]
    UnsupportedDimension(String),
    #[error("UnsupportedScale: {0}")]
    UnsupportedScale(String),
    #[error("PerturbationFailed: no simple perturbation found after {0} attempts")]
    PerturbationFailed(usize),
}
