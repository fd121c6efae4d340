use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{enumerate_faces, FaceLattice, GeometryError, HPolytope};

const RETRY_BUDGET: usize = 32;

/// Every vertex lies on exactly `n` facets.
pub fn is_simple(lattice: &FaceLattice) -> bool {
    lattice.by_dim[0]
        .iter()
        .all(|&v| lattice.faces[v].active.len() == lattice.dim)
}

/// Shifts every offset by an independent uniform amount in
/// `[-magnitude, magnitude]` until the result is simple with the same facets.
pub fn perturb_to_simple(p: &HPolytope, magnitude: f64, seed: u64) -> Result<HPolytope, GeometryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RETRY_BUDGET {
        let raw = p
            .halfspaces()
            .iter()
            .map(|h| (h.normal.clone(), h.offset + rng.gen_range(-magnitude..=magnitude)))
            .collect();
        let Ok(q) = HPolytope::normalize(raw, p.tolerance()) else {
            continue;
        };
        if q.facet_count() != p.facet_count() {
            continue;
        }
        if let Ok(l) = enumerate_faces(&q) {
            if is_simple(&l) {
                return Ok(q);
            }
        }
    }
    Err(GeometryError::PerturbationFailed(RETRY_BUDGET))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;

    #[test]
    fn cube_stays_a_cube() {
        let q = perturb_to_simple(&shapes::cube(3), 1e-3, 1).unwrap();
        assert_eq!(enumerate_faces(&q).unwrap().f_vector(), vec![8, 12, 6]);
    }

    #[test]
    fn pyramid_apex_splits_into_an_edge() {
        let p = shapes::square_pyramid(1.0);
        assert!(!is_simple(&enumerate_faces(&p).unwrap()));
        let q = perturb_to_simple(&p, 1e-3, 5).unwrap();
        let l = enumerate_faces(&q).unwrap();
        assert_eq!(q.facet_count(), 5);
        assert_eq!(l.f_vector(), vec![6, 9, 5]);
        assert!(is_simple(&l));
    }

    #[test]
    fn octahedron_becomes_three_valent() {
        let q = perturb_to_simple(&shapes::cross_polytope(3), 1e-3, 11).unwrap();
        let l = enumerate_faces(&q).unwrap();
        assert_eq!(q.facet_count(), 8);
        assert!(l.by_dim[0].iter().all(|&v| l.faces[v].active.len() == 3));
        // simple 3-polytope: f0 = 2 f2 - 4
        assert_eq!(l.f_vector()[0], 2 * 8 - 4);
    }

    #[test]
    fn failure_is_reported() {
        // a perturbation of zero cannot split the apex
        assert_eq!(
            perturb_to_simple(&shapes::square_pyramid(1.0), 0.0, 0),
            Err(GeometryError::PerturbationFailed(RETRY_BUDGET))
        );
    }
}
