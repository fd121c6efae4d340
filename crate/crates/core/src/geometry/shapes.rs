//! Standard polytopes used by tests, the CLI and the experiment corpus.

use super::{GeometryError, HPolytope, DEFAULT_TOLERANCE};
use crate::linalg::{dot, normalized, orthonormal_basis, sub};

fn build(raw: Vec<(Vec<f64>, f64)>) -> HPolytope {
    HPolytope::normalize(raw, DEFAULT_TOLERANCE).expect("standard shape is a valid polytope")
}

/// `[-1, 1]^n`, facets ordered `x_1 ≤ 1, -x_1 ≤ 1, x_2 ≤ 1, ...`.
pub fn cube(n: usize) -> HPolytope {
    let mut raw = Vec::with_capacity(2 * n);
    for j in 0..n {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; n];
            v[j] = s;
            raw.push((v, 1.0));
        }
    }
    build(raw)
}

/// Box `∏ [-a_j, a_j]`.
pub fn cuboid(half_widths: &[f64]) -> HPolytope {
    let n = half_widths.len();
    let mut raw = Vec::with_capacity(2 * n);
    for (j, a) in half_widths.iter().enumerate() {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; n];
            v[j] = s;
            raw.push((v, *a));
        }
    }
    build(raw)
}

/// Unit normals of a regular simplex centred at the origin; `u_i·u_j = -1/n`.
pub fn regular_simplex_normals(n: usize) -> Vec<Vec<f64>> {
    let k = n + 1;
    let c = 1.0 / k as f64;
    let lifted: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { 1.0 - c } else { -c }).collect())
        .collect();
    let basis = orthonormal_basis(&lifted, 1e-12);
    lifted
        .iter()
        .map(|v| normalized(&basis.iter().map(|b| dot(b, v)).collect::<Vec<_>>()))
        .collect()
}

/// Regular simplex with inradius 1.
pub fn regular_simplex(n: usize) -> HPolytope {
    build(regular_simplex_normals(n).into_iter().map(|u| (u, 1.0)).collect())
}

/// Cross-polytope `{Σ|x_j| ≤ 1}` scaled to inradius 1 (octahedron for n = 3).
pub fn cross_polytope(n: usize) -> HPolytope {
    let mut raw = Vec::new();
    for mask in 0..(1usize << n) {
        let v: Vec<f64> = (0..n)
            .map(|j| if mask >> j & 1 == 1 { -1.0 } else { 1.0 })
            .collect();
        raw.push((v, (n as f64).sqrt()));
    }
    build(raw)
}

/// Regular dodecahedron with inradius 1; normals are the icosahedron vertices.
pub fn dodecahedron() -> HPolytope {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut raw = Vec::new();
    for s1 in [1.0, -1.0] {
        for s2 in [1.0, -1.0] {
            raw.push((vec![0.0, s1, s2 * phi], 0.0));
            raw.push((vec![s1, s2 * phi, 0.0], 0.0));
            raw.push((vec![s2 * phi, 0.0, s1], 0.0));
        }
    }
    build(
        raw.into_iter()
            .map(|(v, _)| (normalized(&v), 1.0))
            .collect(),
    )
}

/// Pyramid over the square `[-1,1]^2 × {0}` with apex `(0, 0, height)`.
pub fn square_pyramid(height: f64) -> HPolytope {
    let mut raw = vec![(vec![0.0, 0.0, -1.0], 0.0)];
    for (a, b) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
        // a·x + b·y + z/height ≤ 1
        raw.push((vec![a, b, 1.0 / height], 1.0));
    }
    build(raw)
}

/// Regular `k`-gon prism of half-height `h`.
pub fn prism(k: usize, h: f64) -> HPolytope {
    let mut raw = vec![(vec![0.0, 0.0, 1.0], h), (vec![0.0, 0.0, -1.0], h)];
    for i in 0..k {
        let a = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
        raw.push((vec![a.cos(), a.sin(), 0.0], 1.0));
    }
    build(raw)
}

/// Regular polygon in the plane with inradius 1, first normal at `phase`.
pub fn regular_polygon(k: usize, phase: f64) -> HPolytope {
    let raw = (0..k)
        .map(|i| {
            let a = phase + 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            (vec![a.cos(), a.sin()], 1.0)
        })
        .collect();
    build(raw)
}

/// Cartesian product; facets of `p` come first, then those of `q`.
pub fn product(p: &HPolytope, q: &HPolytope) -> Result<HPolytope, GeometryError> {
    let (a, b) = (p.dim(), q.dim());
    let mut raw = Vec::new();
    for h in p.halfspaces() {
        let mut v = h.normal.clone();
        v.extend(std::iter::repeat(0.0).take(b));
        raw.push((v, h.offset));
    }
    for h in q.halfspaces() {
        let mut v = vec![0.0; a];
        v.extend(h.normal.iter().copied());
        raw.push((v, h.offset));
    }
    HPolytope::normalize(raw, p.tolerance().min(q.tolerance()))
}

/// Cuts off `vertex` by the plane perpendicular to `vertex - centre` at
/// depth `depth` (measured along that direction).
pub fn truncate(p: &HPolytope, vertex: &[f64], centre: &[f64], depth: f64) -> Result<HPolytope, GeometryError> {
    let u = normalized(&sub(vertex, centre));
    let mut raw: Vec<(Vec<f64>, f64)> = p
        .halfspaces()
        .iter()
        .map(|h| (h.normal.clone(), h.offset))
        .collect();
    raw.push((u.clone(), dot(&u, vertex) - depth));
    HPolytope::normalize(raw, p.tolerance())
}

/// Polytope bounded by the tangent hyperplanes `σ·x ≤ 1` at unit vectors `σ`.
pub fn tangent_polytope(points: &[Vec<f64>]) -> Result<HPolytope, GeometryError> {
    HPolytope::normalize(points.iter().map(|s| (s.clone(), 1.0)).collect(), DEFAULT_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_normals_have_expected_gram() {
        for n in 2..=5 {
            let u = regular_simplex_normals(n);
            for i in 0..=n {
                for j in 0..=n {
                    let g = dot(&u[i], &u[j]);
                    let want = if i == j { 1.0 } else { -1.0 / n as f64 };
                    assert!((g - want).abs() < 1e-12);
                }
            }
        }
    }
}
