//! Small dense vector helpers shared by every module.

use nalgebra::DMatrix;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + s * b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn normalized(a: &[f64]) -> Vec<f64> {
    let l = norm(a);
    scale(a, 1.0 / l)
}

pub fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Arc length between two unit vectors, stable near 0 and π.
pub fn arc(a: &[f64], b: &[f64]) -> f64 {
    let s = norm(&sub(a, b));
    let t = norm(&add(a, b));
    2.0 * s.atan2(t)
}

pub fn centroid(points: &[&[f64]]) -> Vec<f64> {
    let n = points[0].len();
    let mut c = vec![0.0; n];
    for p in points {
        for (ci, pi) in c.iter_mut().zip(p.iter()) {
            *ci += pi;
        }
    }
    scale(&c, 1.0 / points.len() as f64)
}

/// Numerical rank of a set of row vectors, relative to the largest singular value.
pub fn rank(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let n = rows[0].len();
    let m = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_tol * max).count()
}

/// Affine dimension of a point set.
pub fn affine_rank(points: &[&[f64]], rel_tol: f64) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let rows: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, points[0])).collect();
    rank(&rows, rel_tol)
}

/// Orthonormal basis (as rows) of the span of `vectors`.
pub fn orthonormal_basis(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w = axpy(&w, -c, b);
            }
        }
        let l = norm(&w);
        if l > tol {
            basis.push(scale(&w, 1.0 / l));
        }
    }
    basis
}

/// Determinant of a square matrix given by rows.
pub fn det(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    m.determinant()
}

/// Solves `M x = rhs` where `M` has the given columns.
pub fn solve_columns(columns: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let m = DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i]);
    let b = nalgebra::DVector::from_column_slice(rhs);
    m.lu().solve(&b).map(|x| x.iter().cloned().collect())
}

/// Surface measure of the unit sphere S^d ⊂ R^{d+1}.
pub fn sphere_volume(d: usize) -> f64 {
    use std::f64::consts::PI;
    match d {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 1.0) * sphere_volume(d - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn arc_is_stable_at_extremes() {
        assert!((arc(&[1.0, 0.0], &[-1.0, 0.0]) - PI).abs() < 1e-15);
        assert_eq!(arc(&[0.0, 1.0], &[0.0, 1.0]), 0.0);
    }

    #[test]
    fn ranks() {
        let pts = [vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]];
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        assert_eq!(affine_rank(&refs, 1e-12), 1);
    }
}
