//! Cube labelings, separation certificates and the degree of the associated
//! map to the sphere.
//!
//! A labeling picks, for each axis `i` of the cube `[-1, 1]^k`, a nonempty
//! class of facets pulled back from the face `x_i = -1` and a disjoint class
//! pulled back from `x_i = 1`. Its separation is the smallest distance
//! between paired classes; it is a lower bound for the spread once the map
//! it induces has nonzero degree.

mod cube_map;
mod labeling;
mod search;

pub use cube_map::{build_cube_map, LipschitzReport, SphereMap};
pub use labeling::{AxisClasses, CubeLabeling};
pub use search::{search_spread, SearchInfo, SearchMode, SearchOptions};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dual_graph::{edge_graph_from_lattice, EdgeGraph, GraphError, Provenance, Weight};
use crate::geometry::{enumerate_faces, FaceLattice, GeometryError, HPolytope};

#[derive(Debug, Error, PartialEq)]
pub enum SpreadError {
    #[error("EmptyClass: axis {axis} has an empty {side} class")]
    EmptyClass { axis: usize, side: &'static str },
    #[error("OverlappingClasses: facet {facet} is in both classes of axis {axis}")]
    OverlappingClasses { axis: usize, facet: usize },
    #[error("InvalidFacet: {0}")]
    InvalidFacet(usize),
    #[error("BadDPrime: {0}")]
    BadDPrime(String),
    #[error("RefineMesh: preimage counts {0:?} disagree across regular values")]
    RefineMesh(Vec<i64>),
    #[error("VanishingImage: the cube map is zero at mesh point {0}")]
    VanishingImage(usize),
    #[error("VanishingSimplex: the cube map is zero inside mesh simplex {0}")]
    VanishingSimplex(usize),
    #[error("DegreeUndefined: domain dimension {domain} differs from target sphere dimension {target}")]
    DegreeUndefined { domain: usize, target: usize },
    #[error("NoValidLabeling: {0}")]
    NoValidLabeling(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Graph together with the polytope it came from, if any.
#[derive(Debug, Clone)]
pub struct SpreadInstance {
    pub graph: EdgeGraph,
    pub geometry: Option<(HPolytope, FaceLattice)>,
}

impl SpreadInstance {
    pub fn from_polytope(p: &HPolytope) -> Result<Self, SpreadError> {
        let lattice = enumerate_faces(p)?;
        let graph = edge_graph_from_lattice(p, &lattice);
        Ok(SpreadInstance { graph, geometry: Some((p.clone(), lattice)) })
    }

    pub fn from_graph(graph: EdgeGraph) -> Self {
        SpreadInstance { graph, geometry: None }
    }

    /// Dimension of the polytope, if there is one.
    pub fn dim(&self) -> Option<usize> {
        self.geometry.as_ref().map(|(p, _)| p.dim())
    }

    pub fn facet_count(&self) -> usize {
        self.graph.vertex_count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeStatus {
    Computed(i64),
    /// abstract graph: no geometry to compute from, taken on trust
    Asserted,
    /// `k < n`: the relative-homology condition is not checked
    Unverified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadCertificate {
    pub k: usize,
    pub weight: Weight,
    pub d: f64,
    /// distance between the classes of each axis
    pub separations: Vec<f64>,
    pub degree: DegreeStatus,
    pub labeling: CubeLabeling,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchInfo>,
}

impl SpreadCertificate {
    /// Whether `d` is a proven lower bound on the spread.
    pub fn is_valid_lower_bound(&self) -> bool {
        match self.degree {
            DegreeStatus::Computed(deg) => deg != 0,
            DegreeStatus::Asserted => true,
            DegreeStatus::Unverified => false,
        }
    }
}

/// Resolution and sampling seed for the sphere map behind a degree check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapOptions {
    pub resolution: usize,
    pub seed: u64,
}

impl Default for MapOptions {
    fn default() -> Self {
        MapOptions { resolution: 1, seed: 0 }
    }
}

pub(crate) fn separations(
    g: &EdgeGraph,
    labeling: &CubeLabeling,
    weight: Weight,
) -> Result<Vec<f64>, SpreadError> {
    labeling
        .axes
        .iter()
        .map(|a| Ok(g.distance(&a.minus, &a.plus, weight)?))
        .collect()
}

/// Computes the separation of `labeling` and, for a polytope with `k = n`,
/// the degree of its cube map taken with `D′ = d`.
pub fn certify(
    inst: &SpreadInstance,
    labeling: &CubeLabeling,
    weight: Weight,
    opts: MapOptions,
) -> Result<SpreadCertificate, SpreadError> {
    labeling.validate(inst.facet_count())?;
    let seps = separations(&inst.graph, labeling, weight)?;
    let d = seps.iter().copied().fold(f64::INFINITY, f64::min);
    let degree = match (&inst.geometry, inst.graph.provenance()) {
        (Some((p, lattice)), _) if p.dim() == labeling.k() => {
            let map = build_cube_map(p, lattice, &inst.graph, labeling, weight, d, opts.resolution)?;
            DegreeStatus::Computed(map.degree(opts.seed)?)
        }
        (None, Provenance::Abstract) => DegreeStatus::Asserted,
        _ => DegreeStatus::Unverified,
    };
    Ok(SpreadCertificate {
        k: labeling.k(),
        weight,
        d,
        separations: seps,
        degree,
        labeling: labeling.clone(),
        search: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual_graph::subdivided_cube_graph;
    use crate::geometry::shapes;
    use std::f64::consts::PI;

    #[test]
    fn cube_natural_labeling() {
        let inst = SpreadInstance::from_polytope(&shapes::cube(3)).unwrap();
        let l = CubeLabeling::natural_cube(3);
        let c = certify(&inst, &l, Weight::Angular, MapOptions::default()).unwrap();
        assert!((c.d - PI).abs() < 1e-12);
        assert!(matches!(c.degree, DegreeStatus::Computed(1) | DegreeStatus::Computed(-1)));
        assert!(c.is_valid_lower_bound());
        let c = certify(&inst, &l, Weight::Comb, MapOptions::default()).unwrap();
        assert_eq!(c.d, 2.0);
    }

    #[test]
    fn empty_class_rejected() {
        let inst = SpreadInstance::from_polytope(&shapes::cube(3)).unwrap();
        let mut l = CubeLabeling::natural_cube(3);
        l.axes[1].plus.clear();
        assert_eq!(
            certify(&inst, &l, Weight::Angular, MapOptions::default()),
            Err(SpreadError::EmptyClass { axis: 1, side: "plus" })
        );
    }

    #[test]
    fn subdivided_cube_band_labeling() {
        for n in [1, 2, 5] {
            let (g, sides) = subdivided_cube_graph(n).unwrap();
            let inst = SpreadInstance::from_graph(g);
            let c = certify(&inst, &CubeLabeling::bands(&sides), Weight::Comb, MapOptions::default()).unwrap();
            assert_eq!(c.d, (n + 1) as f64);
            assert_eq!(c.degree, DegreeStatus::Asserted);
        }
    }

    #[test]
    fn lower_k_is_unverified() {
        let inst = SpreadInstance::from_polytope(&shapes::cube(3)).unwrap();
        let mut l = CubeLabeling::natural_cube(3);
        l.axes.truncate(2);
        let c = certify(&inst, &l, Weight::Comb, MapOptions::default()).unwrap();
        assert_eq!(c.degree, DegreeStatus::Unverified);
        assert!(!c.is_valid_lower_bound());
    }

    #[test]
    fn certificate_json_round_trip() {
        let inst = SpreadInstance::from_polytope(&shapes::cube(3)).unwrap();
        let c = certify(&inst, &CubeLabeling::natural_cube(3), Weight::Angular, MapOptions::default()).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<SpreadCertificate>(&s).unwrap(), c);
    }
}
