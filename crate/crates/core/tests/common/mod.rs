#![allow(dead_code)]

use polyspread::geometry::{enumerate_faces, is_simple, shapes, HPolytope};
use polyspread::random_poly::sample_sphere;
use polyspread::waists::generic_map;

/// Tangent polytope of `m` random points on `S^{n-1}`, if bounded.
pub fn random_polytope(n: usize, m: usize, seed: u64) -> Option<HPolytope> {
    let sample = sample_sphere(n, m, seed).ok()?;
    shapes::tangent_polytope(&sample.points).ok()
}

/// First bounded simple tangent polytope at or after `seed`.
pub fn random_simple(n: usize, m: usize, seed: u64) -> HPolytope {
    (seed..)
        .find_map(|s| random_polytope(n, m, s).filter(|p| is_simple(&enumerate_faces(p).unwrap())))
        .unwrap()
}

/// Proper rotation of `R^n` from a seed.
pub fn rotation(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = generic_map(n, n, seed);
    if polyspread::linalg::det(&r) < 0.0 {
        r[0].iter_mut().for_each(|x| *x = -*x);
    }
    r
}

/// Facet of `q` carrying the rotated normal of each facet of `p`.
pub fn facet_map(p: &HPolytope, q: &HPolytope, r: &[Vec<f64>]) -> Vec<usize> {
    (0..p.facet_count())
        .map(|f| {
            let u: Vec<f64> = r.iter().map(|row| polyspread::linalg::dot(row, p.normal(f))).collect();
            (0..q.facet_count())
                .min_by(|a, b| {
                    polyspread::linalg::arc(&u, q.normal(*a)).total_cmp(&polyspread::linalg::arc(&u, q.normal(*b)))
                })
                .unwrap()
        })
        .collect()
}
