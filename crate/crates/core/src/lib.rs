//! Combinatorial and metric machinery for convex polytopes: complementary
//! dihedral angles, the dual facet graph and its metrics, cube-spread
//! certificates, skyscraper polytopes, rounded boundaries with the
//! mean-curvature metric, random tangent polytopes and fiber overlap counts.

pub mod dual_graph;
pub mod geometry;
pub mod linalg;
pub mod lp;
pub mod random_poly;
pub mod rounding;
pub mod skyscraper;
pub mod spread;
pub mod waists;
