//! The map `Δ = (2δ_i / D′ − 1)_i` into the cube followed by radial
//! projection, and its degree.
//!
//! The domain is the unit sphere of outward normals, triangulated by the
//! barycentric subdivision of the dual tessellation: a simplex per flag
//! `vertex ⊂ ... ⊂ facet`, with the corner of a face placed at the normalised
//! sum of its facet normals. This sphere is the Gauss image of the rounded
//! boundary, and a dual edge between adjacent facets is an arc of length ⟩.

use std::collections::{HashMap, HashSet};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{separations, CubeLabeling, SpreadError};
use crate::dual_graph::{EdgeGraph, Weight};
use crate::geometry::{FaceLattice, HPolytope};
use crate::linalg::{arc, norm, normalized, scale};
use crate::lp::{LinearProgram, LpOutcome, Relation};

/// `D′` may exceed the largest separation by this relative margin.
const DPRIME_SLACK: f64 = 0.01;
const VANISHING: f64 = 1e-12;
const DEGENERATE: f64 = 1e-14;
const REGULAR_VALUES: usize = 5;
const SAMPLE_BUDGET: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    /// largest `|f(a) − f(b)| / arc(a, b)` over mesh edges
    pub measured: f64,
    /// `2√k / D′`
    pub bound: f64,
    pub edges: usize,
}

/// Simplicial map from a triangulated sphere in `R^n` to the unit sphere in `R^k`.
#[derive(Debug, Clone)]
pub struct SphereMap {
    /// mesh vertices on the unit sphere
    pub points: Vec<Vec<f64>>,
    /// `n` point ids per simplex
    pub simplices: Vec<Vec<usize>>,
    /// unit vectors, or zero where the map vanishes
    pub images: Vec<Vec<f64>>,
    /// cube-map value at the corner of every face of the lattice
    pub delta: Vec<Vec<f64>>,
    pub d_prime: f64,
    pub lipschitz: LipschitzReport,
}

impl SphereMap {
    /// Map given directly by its vertex images.
    pub fn from_parts(points: Vec<Vec<f64>>, simplices: Vec<Vec<usize>>, images: Vec<Vec<f64>>) -> Self {
        let k = images.first().map_or(0, Vec::len);
        let lipschitz = lipschitz(&points, &simplices, &images, f64::INFINITY, k);
        SphereMap { points, simplices, images, delta: Vec::new(), d_prime: f64::INFINITY, lipschitz }
    }

    /// Signed count of preimages of random regular values.
    ///
    /// Every simplex whose image cone contains the value strictly counts
    /// with the product of its domain and image orientations. At least
    /// five regular values must agree.
    pub fn degree(&self, seed: u64) -> Result<i64, SpreadError> {
        let n = self.points.first().map_or(0, Vec::len);
        let k = self.images.first().map_or(0, Vec::len);
        if n != k || self.simplices.iter().any(|s| s.len() != n) {
            return Err(SpreadError::DegreeUndefined { domain: n, target: k });
        }
        if let Some(v) = self.images.iter().position(|f| norm(f) < VANISHING) {
            return Err(SpreadError::VanishingImage(v));
        }
        let mut cones: Vec<(DMatrix<f64>, i64)> = Vec::with_capacity(self.simplices.len());
        for (id, s) in self.simplices.iter().enumerate() {
            let domain = DMatrix::from_fn(n, n, |i, j| self.points[s[j]][i]);
            let image = DMatrix::from_fn(n, n, |i, j| self.images[s[j]][i]);
            let (dd, di) = (domain.determinant(), image.determinant());
            let inv = if di.abs() < DEGENERATE { None } else { image.clone().try_inverse() };
            match inv {
                Some(inv) => cones.push((inv, (dd.signum() * di.signum()) as i64)),
                // a flat image covers nothing unless the segment through it meets zero
                None if hull_meets_origin(&image) => return Err(SpreadError::VanishingSimplex(id)),
                None => {}
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = Vec::new();
        for _ in 0..SAMPLE_BUDGET {
            let y: Vec<f64> = normalized(&(0..n).map(|_| StandardNormal.sample(&mut rng)).collect::<Vec<f64>>());
            let y = nalgebra::DVector::from_vec(y);
            let mut count = 0;
            let mut regular = true;
            for (inv, sign) in &cones {
                let lambda = inv * &y;
                let lo = lambda.min();
                let scale = lambda.amax().max(1.0);
                if lo > 1e-9 * scale {
                    count += sign;
                } else if lo > -1e-9 * scale {
                    regular = false;
                    break;
                }
            }
            if regular {
                counts.push(count);
                if counts.len() == REGULAR_VALUES {
                    break;
                }
            }
        }
        if counts.len() < REGULAR_VALUES || counts.iter().any(|c| *c != counts[0]) {
            return Err(SpreadError::RefineMesh(counts));
        }
        Ok(counts[0])
    }
}

/// Whether some convex combination of the columns is (nearly) zero.
fn hull_meets_origin(image: &DMatrix<f64>) -> bool {
    let (n, m) = image.shape();
    let mean = image.column_sum();
    if image.column_iter().all(|c| c.dot(&mean) > 1e-9) {
        return false;
    }
    let mut lp = LinearProgram::maximize(vec![0.0; m]);
    for j in 0..m {
        lp.bound(j, 0.0, f64::INFINITY);
    }
    lp.row(vec![1.0; m], Relation::Eq, 1.0);
    for i in 0..n {
        let row: Vec<f64> = (0..m).map(|j| image[(i, j)]).collect();
        lp.row(row.clone(), Relation::Le, 1e-9);
        lp.row(row, Relation::Ge, -1e-9);
    }
    matches!(lp.solve(), LpOutcome::Optimal { .. })
}

fn lipschitz(points: &[Vec<f64>], simplices: &[Vec<usize>], images: &[Vec<f64>], d_prime: f64, k: usize) -> LipschitzReport {
    let mut seen = HashSet::new();
    let mut measured: f64 = 0.0;
    for s in simplices {
        for (x, &a) in s.iter().enumerate() {
            for &b in &s[x + 1..] {
                let key = (a.min(b), a.max(b));
                if !seen.insert(key) {
                    continue;
                }
                if norm(&images[a]) < VANISHING || norm(&images[b]) < VANISHING {
                    continue;
                }
                let len = arc(&points[a], &points[b]);
                if len > 0.0 {
                    let d: f64 = images[a]
                        .iter()
                        .zip(&images[b])
                        .map(|(p, q)| (p - q) * (p - q))
                        .sum::<f64>()
                        .sqrt();
                    measured = measured.max(d / len);
                }
            }
        }
    }
    LipschitzReport { measured, bound: 2.0 * (k as f64).sqrt() / d_prime, edges: seen.len() }
}

/// Kuhn subdivision of the simplex with `m + 1` corners into `r^m` pieces.
///
/// Returns lattice points as barycentric numerators (summing to `r`) and
/// pieces as indices into that list.
fn kuhn_subdivision(m: usize, r: usize) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    // staircase coordinates r ≥ i_1 ≥ ... ≥ i_m ≥ 0
    let mut stairs: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..m {
        let mut next = Vec::new();
        for s in &stairs {
            let top = s.last().copied().unwrap_or(r);
            for v in 0..=top {
                let mut t = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        stairs = next;
    }
    let index: HashMap<Vec<usize>, usize> = stairs.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let weights = stairs
        .iter()
        .map(|s| {
            let mut w = Vec::with_capacity(m + 1);
            w.push(r - s.first().copied().unwrap_or(0));
            for j in 0..m {
                w.push(s[j] - s.get(j + 1).copied().unwrap_or(0));
            }
            w
        })
        .collect();

    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for len in 0..m {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=len).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, len);
                    q
                })
            })
            .collect();
    }
    let mut pieces = Vec::new();
    for base in &stairs {
        for p in &perms {
            let mut cur = base.clone();
            let mut ids = vec![index[&cur]];
            for &axis in p {
                cur[axis] += 1;
                match index.get(&cur) {
                    Some(&id) => ids.push(id),
                    None => break,
                }
            }
            if ids.len() == m + 1 {
                pieces.push(ids);
            }
        }
    }
    (weights, pieces)
}

/// Builds the cube map of `labeling` with truncation `d_prime`.
///
/// `resolution` subdivides every flag simplex into `resolution^{n-1}` pieces.
pub fn build_cube_map(
    p: &HPolytope,
    lattice: &FaceLattice,
    g: &EdgeGraph,
    labeling: &CubeLabeling,
    weight: Weight,
    d_prime: f64,
    resolution: usize,
) -> Result<SphereMap, SpreadError> {
    labeling.validate(g.vertex_count())?;
    let max_sep = separations(g, labeling, weight)?
        .into_iter()
        .fold(0.0, f64::max);
    if !(d_prime > 0.0 && d_prime.is_finite()) || d_prime > max_sep * (1.0 + DPRIME_SLACK) {
        return Err(SpreadError::BadDPrime(format!(
            "D′ = {d_prime} must lie in (0, {max_sep}] up to {DPRIME_SLACK} relative slack"
        )));
    }
    if resolution == 0 {
        return Err(SpreadError::BadDPrime("mesh resolution must be at least 1".into()));
    }
    let n = p.dim();
    let k = labeling.k();

    let facet_delta: Vec<Vec<f64>> = {
        let per_axis: Vec<Vec<f64>> = labeling
            .axes
            .iter()
            .map(|a| g.distances_from(&a.minus, weight))
            .collect::<Result<_, _>>()?;
        (0..g.vertex_count())
            .map(|f| {
                per_axis
                    .iter()
                    .map(|d| 2.0 * d[f].min(d_prime) / d_prime - 1.0)
                    .collect()
            })
            .collect()
    };
    let mut corners = Vec::with_capacity(lattice.faces.len());
    let mut delta = Vec::with_capacity(lattice.faces.len());
    for face in &lattice.faces {
        let mut c = vec![0.0; n];
        let mut v = vec![0.0; k];
        for &f in &face.active {
            for (x, u) in c.iter_mut().zip(p.normal(f)) {
                *x += u;
            }
            for (x, y) in v.iter_mut().zip(&facet_delta[f]) {
                *x += y;
            }
        }
        corners.push(normalized(&c));
        delta.push(scale(&v, 1.0 / face.active.len() as f64));
    }
    let corner_image: Vec<Vec<f64>> = delta
        .iter()
        .map(|v| {
            let l = norm(v);
            if l < VANISHING {
                vec![0.0; k]
            } else {
                scale(v, 1.0 / l)
            }
        })
        .collect();

    let (weights, pieces) = kuhn_subdivision(n - 1, resolution);
    let mut key_to_point: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    let mut points = Vec::new();
    let mut images = Vec::new();
    let mut simplices = Vec::new();
    for flag in lattice.flags() {
        let local: Vec<usize> = weights
            .iter()
            .map(|w| {
                let mut key: Vec<(usize, usize)> = flag
                    .iter()
                    .zip(w)
                    .filter(|(_, w)| **w > 0)
                    .map(|(f, w)| (*f, *w))
                    .collect();
                key.sort_unstable();
                *key_to_point.entry(key).or_insert_with(|| {
                    let mut x = vec![0.0; n];
                    let mut y = vec![0.0; k];
                    for (f, w) in flag.iter().zip(w) {
                        let w = *w as f64;
                        for (a, b) in x.iter_mut().zip(&corners[*f]) {
                            *a += w * b;
                        }
                        for (a, b) in y.iter_mut().zip(&corner_image[*f]) {
                            *a += w * b;
                        }
                    }
                    points.push(normalized(&x));
                    let l = norm(&y);
                    images.push(if l < VANISHING * resolution as f64 { vec![0.0; k] } else { scale(&y, 1.0 / l) });
                    points.len() - 1
                })
            })
            .collect();
        for piece in &pieces {
            simplices.push(piece.iter().map(|i| local[*i]).collect());
        }
    }
    let lipschitz = lipschitz(&points, &simplices, &images, d_prime, k);
    Ok(SphereMap { points, simplices, images, delta, d_prime, lipschitz })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual_graph::edge_graph_from_lattice;
    use crate::geometry::{enumerate_faces, shapes};
    use crate::spread::AxisClasses;
    use std::f64::consts::PI;

    /// Boundary of the octahedron with outward-oriented triangles.
    fn octahedron() -> (Vec<Vec<f64>>, Vec<Vec<usize>>) {
        let pts = vec![
            vec![1.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, -1.0],
        ];
        let mut tris = Vec::new();
        for x in [0, 1] {
            for y in [2, 3] {
                for z in [4, 5] {
                    tris.push(vec![x, y, z]);
                }
            }
        }
        (pts, tris)
    }

    #[test]
    fn identity_antipodal_constant() {
        let (pts, tris) = octahedron();
        let id = SphereMap::from_parts(pts.clone(), tris.clone(), pts.clone());
        assert_eq!(id.degree(1).unwrap(), 1);
        let anti: Vec<Vec<f64>> = pts.iter().map(|p| scale(p, -1.0)).collect();
        assert_eq!(SphereMap::from_parts(pts.clone(), tris.clone(), anti).degree(2).unwrap(), -1);
        let constant = vec![vec![0.0, 0.0, 1.0]; pts.len()];
        assert_eq!(SphereMap::from_parts(pts, tris, constant).degree(3).unwrap(), 0);
    }

    #[test]
    fn kuhn_counts() {
        for m in 1..=4 {
            for r in 1..=3 {
                let (w, pieces) = kuhn_subdivision(m, r);
                assert_eq!(pieces.len(), r.pow(m as u32));
                assert!(w.iter().all(|w| w.iter().sum::<usize>() == r));
            }
        }
    }

    fn cube_map(res: usize) -> SphereMap {
        let p = shapes::cube(3);
        let l = enumerate_faces(&p).unwrap();
        let g = edge_graph_from_lattice(&p, &l);
        let d_prime = PI * (1.0 + 1e-3);
        build_cube_map(&p, &l, &g, &CubeLabeling::natural_cube(3), Weight::Angular, d_prime, res).unwrap()
    }

    #[test]
    fn cube_map_is_lipschitz_with_unit_degree() {
        for res in [1, 2, 4] {
            let m = cube_map(res);
            assert_eq!(m.simplices.len(), 48 * res * res);
            assert!(m.images.iter().all(|f| (norm(f) - 1.0).abs() < 1e-9));
            assert!(m.lipschitz.measured <= m.lipschitz.bound + 0.05, "{:?}", m.lipschitz);
            assert_eq!(m.degree(7).unwrap().abs(), 1);
        }
    }

    #[test]
    fn bad_d_prime() {
        let p = shapes::cube(3);
        let l = enumerate_faces(&p).unwrap();
        let g = edge_graph_from_lattice(&p, &l);
        let lab = CubeLabeling::natural_cube(3);
        for d in [0.0, -1.0, 4.0, f64::NAN] {
            assert!(matches!(
                build_cube_map(&p, &l, &g, &lab, Weight::Angular, d, 1),
                Err(SpreadError::BadDPrime(_))
            ));
        }
    }

    #[test]
    fn simplex_poles_map_to_their_side() {
        let p = shapes::regular_simplex(3);
        let l = enumerate_faces(&p).unwrap();
        let g = edge_graph_from_lattice(&p, &l);
        let lab = CubeLabeling { axes: vec![AxisClasses { minus: vec![0], plus: vec![1] }] };
        let d = (-1.0f64 / 3.0).acos();
        let m = build_cube_map(&p, &l, &g, &lab, Weight::Angular, d, 1).unwrap();
        for (face, v) in l.faces.iter().zip(&m.delta) {
            // facet 0 sits at −1, every other facet is one edge away, at +1
            let want = face.active.iter().map(|f| if *f == 0 { -1.0 } else { 1.0 }).sum::<f64>()
                / face.active.len() as f64;
            assert!((v[0] - want).abs() < 1e-12);
        }
        for f in &m.images {
            assert!(f[0] == 0.0 || f[0].abs() == 1.0);
        }
        assert!(matches!(m.degree(0), Err(SpreadError::DegreeUndefined { domain: 3, target: 1 })));
    }
}
