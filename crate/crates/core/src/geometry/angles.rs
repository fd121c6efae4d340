use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{FaceLattice, GeometryError, HPolytope};
use crate::linalg::{arc, cross, dot, norm, orthonormal_basis, sphere_volume};
use crate::lp::{LinearProgram, LpOutcome, Relation};

fn check_facet(p: &HPolytope, i: usize) -> Result<(), GeometryError> {
    if i >= p.facet_count() {
        Err(GeometryError::InvalidFacet(i))
    } else {
        Ok(())
    }
}

/// Whether facets `i` and `j` meet in an (n-2)-dimensional face.
///
/// Decided by LP: a point on both hyperplanes with strictly positive slack in
/// every other constraint must exist.
pub fn are_adjacent(p: &HPolytope, i: usize, j: usize) -> Result<bool, GeometryError> {
    check_facet(p, i)?;
    check_facet(p, j)?;
    if i == j {
        return Err(GeometryError::InvalidFacet(j));
    }
    let n = p.dim();
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let mut lp = LinearProgram::maximize(obj);
    lp.bound(n, f64::NEG_INFINITY, p.scale());
    for (l, h) in p.halfspaces().iter().enumerate() {
        let mut row = h.normal.clone();
        if l == i || l == j {
            row.push(0.0);
            lp.row(row, Relation::Eq, h.offset);
        } else {
            row.push(1.0);
            lp.row(row, Relation::Le, h.offset);
        }
    }
    Ok(match lp.solve() {
        LpOutcome::Optimal { value, .. } => value > p.lp_tolerance(),
        _ => false,
    })
}

/// π minus the interior dihedral angle between adjacent facets, i.e. the arc
/// between their outward unit normals.
pub fn complementary_angle(p: &HPolytope, i: usize, j: usize) -> Result<f64, GeometryError> {
    if !are_adjacent(p, i, j)? {
        return Err(GeometryError::NotAdjacent(i, j));
    }
    Ok(arc(p.normal(i), p.normal(j)))
}

/// The cone of linear functionals maximised over the polytope exactly on a face.
#[derive(Debug, Clone)]
pub struct NormalCone {
    pub face: usize,
    pub generators: Vec<Vec<f64>>,
    /// dimension of the cone's spherical section, `n - k - 1`
    pub section_dim: usize,
    witness: Vec<f64>,
    face_vertices: Vec<usize>,
}

impl NormalCone {
    pub fn new(p: &HPolytope, lattice: &FaceLattice, face: usize) -> Result<Self, GeometryError> {
        let f = lattice.faces.get(face).ok_or(GeometryError::InvalidFace(face))?;
        Ok(NormalCone {
            face,
            generators: f.active.iter().map(|i| p.normal(*i).to_vec()).collect(),
            section_dim: p.dim() - f.dim - 1,
            witness: f.witness.clone(),
            face_vertices: f.vertices.clone(),
        })
    }

    /// `u` is in the cone iff `x ↦ u·x` attains its maximum on the whole face.
    pub fn contains(&self, lattice: &FaceLattice, u: &[f64], tol: f64) -> bool {
        let top = dot(u, &self.witness);
        let scale = norm(u).max(1e-300);
        lattice.vertex_coords.iter().enumerate().all(|(v, w)| {
            let d = dot(u, w) - top;
            if self.face_vertices.binary_search(&v).is_ok() {
                d.abs() <= tol * scale
            } else {
                d <= tol * scale
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoangleMethod {
    Exact,
    MonteCarlo,
}

/// Spherical volume of a normal-cone section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coangle {
    pub value: f64,
    /// zero for closed-form values
    pub std_error: f64,
    pub method: CoangleMethod,
}

/// Spherical (n-k-1)-volume of the set of unit normals of supporting
/// hyperplanes along the k-face `face`.
///
/// Closed forms are used for arcs (k = n-2) and for vertex cones of
/// 3-polytopes (spherical excess); everything else is estimated by sampling
/// the cone's linear span, and `Exact` silently falls back to sampling there.
pub fn coangle(
    p: &HPolytope,
    lattice: &FaceLattice,
    face: usize,
    method: CoangleMethod,
    samples: usize,
    seed: u64,
) -> Result<Coangle, GeometryError> {
    let f = lattice.faces.get(face).ok_or(GeometryError::InvalidFace(face))?;
    let n = p.dim();
    if f.dim + 1 >= n {
        return Err(GeometryError::UnsupportedDimension(format!(
            "coangle of a {}-face in dimension {n} is a single point",
            f.dim
        )));
    }
    let cone = NormalCone::new(p, lattice, face)?;
    if method == CoangleMethod::Exact {
        if f.dim + 2 == n {
            return Ok(Coangle {
                value: arc(&cone.generators[0], &cone.generators[1]),
                std_error: 0.0,
                method: CoangleMethod::Exact,
            });
        }
        if n == 3 && f.dim == 0 {
            return Ok(Coangle {
                value: spherical_polygon_area(&cone.generators),
                std_error: 0.0,
                method: CoangleMethod::Exact,
            });
        }
    }
    if samples == 0 {
        return Err(GeometryError::UnsupportedDimension("Monte-Carlo coangle needs samples".into()));
    }
    let basis = orthonormal_basis(&cone.generators, 1e-10);
    let span = basis.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = 1e-12;
    let mut hits = 0usize;
    for _ in 0..samples {
        let z: Vec<f64> = (0..span).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut u = vec![0.0; n];
        for (c, b) in z.iter().zip(&basis) {
            for (ui, bi) in u.iter_mut().zip(b) {
                *ui += c * bi;
            }
        }
        if cone.contains(lattice, &u, tol) {
            hits += 1;
        }
    }
    let frac = hits as f64 / samples as f64;
    let vol = sphere_volume(span - 1);
    Ok(Coangle {
        value: frac * vol,
        std_error: vol * (frac * (1.0 - frac) / samples as f64).sqrt(),
        method: CoangleMethod::MonteCarlo,
    })
}

/// Area of the convex spherical polygon with the given (unordered) vertices.
pub(crate) fn spherical_polygon_area(vertices: &[Vec<f64>]) -> f64 {
    let m = vertices.len();
    let mut mean = vec![0.0; 3];
    for v in vertices {
        for k in 0..3 {
            mean[k] += v[k];
        }
    }
    let mean: Vec<f64> = mean.iter().map(|x| x / norm(&mean)).collect();
    // tangent frame at the mean direction
    let seed = if mean[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = {
        let c = cross(&mean, &seed);
        let l = norm(&c);
        c.map(|x| x / l)
    };
    let e2 = cross(&mean, &e1);
    let mut order: Vec<(f64, usize)> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (dot(v, &e2).atan2(dot(v, &e1)), i))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let a = &vertices[order[0].1];
    let mut area = 0.0;
    for w in 1..m - 1 {
        let b = &vertices[order[w].1];
        let c = &vertices[order[w + 1].1];
        let triple = dot(a, &cross(b, c));
        let den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
        area += 2.0 * triple.abs().atan2(den);
    }
    area
}
