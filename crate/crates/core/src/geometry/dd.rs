//! Vertex enumeration by the double description method.
//!
//! The polytope `{x : a_i·x ≤ b_i}` is homogenised to the cone
//! `{(x, t) : b_i t - a_i·x ≥ 0, t ≥ 0}` whose extreme rays are `(v, 1)` for
//! the vertices `v`. Constraints are added one at a time; new rays are
//! combinations of adjacent positive/negative pairs, adjacency being decided
//! combinatorially from zero sets.

use super::{GeometryError, Halfspace};
use crate::linalg::{dot, norm, scale};

struct Ray {
    y: Vec<f64>,
    /// processed rows with `row·y = 0`, sorted
    zeros: Vec<u32>,
}

fn sorted_intersection(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn is_subset(small: &[u32], big: &[u32]) -> bool {
    let mut j = 0;
    for x in small {
        while j < big.len() && big[j] < *x {
            j += 1;
        }
        if j == big.len() || big[j] != *x {
            return false;
        }
    }
    true
}

/// Rays are kept with `max(|x|_∞ / len_scale, |t|) = 1` so that row values
/// read directly as slacks for vertices inside the scale box.
fn rescale(y: &mut [f64], len_scale: f64) {
    let n = y.len() - 1;
    let m = y[..n]
        .iter()
        .map(|v| v.abs() / len_scale)
        .fold(y[n].abs(), f64::max);
    if m > 0.0 {
        for v in y.iter_mut() {
            *v /= m;
        }
    }
}

pub(crate) fn enumerate_vertices(
    dim: usize,
    halfspaces: &[Halfspace],
    len_scale: f64,
    zero_tol: f64,
) -> Result<Vec<Vec<f64>>, GeometryError> {
    let n = dim;
    let d = n + 1;
    let mut rows: Vec<Vec<f64>> = halfspaces
        .iter()
        .map(|h| {
            let mut r: Vec<f64> = h.normal.iter().map(|a| -a).collect();
            r.push(h.offset);
            r
        })
        .collect();
    let mut t_row = vec![0.0; d];
    t_row[n] = len_scale;
    rows.push(t_row);

    // initial simplicial cone from d independent rows
    let mut chosen: Vec<usize> = Vec::new();
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut w = scale(r, 1.0 / norm(r));
        for _ in 0..2 {
            for b in &ortho {
                let c = dot(&w, b);
                w = w.iter().zip(b).map(|(x, y)| x - c * y).collect();
            }
        }
        let l = norm(&w);
        if l > 1e-8 {
            ortho.push(scale(&w, 1.0 / l));
            chosen.push(i);
            if chosen.len() == d {
                break;
            }
        }
    }
    if chosen.len() < d {
        return Err(GeometryError::Unbounded);
    }
    let a = nalgebra::DMatrix::from_fn(d, d, |i, j| rows[chosen[i]][j]);
    let inv = a
        .try_inverse()
        .ok_or_else(|| GeometryError::ToleranceConflict("singular initial basis".into()))?;
    let mut rays: Vec<Ray> = (0..d)
        .map(|j| {
            let mut y: Vec<f64> = (0..d).map(|i| inv[(i, j)]).collect();
            rescale(&mut y, len_scale);
            let mut zeros: Vec<u32> = chosen
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, r)| *r as u32)
                .collect();
            zeros.sort_unstable();
            Ray { y, zeros }
        })
        .collect();

    let order: Vec<usize> = (0..rows.len()).filter(|i| !chosen.contains(i)).collect();
    for &row_idx in &order {
        let row = &rows[row_idx];
        let vals: Vec<f64> = rays.iter().map(|r| dot(row, &r.y)).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] < -zero_tol).collect();
        if neg.is_empty() {
            for k in 0..rays.len() {
                if vals[k].abs() <= zero_tol {
                    let z = &mut rays[k].zeros;
                    z.push(row_idx as u32);
                    z.sort_unstable();
                }
            }
            continue;
        }

        // inverted index: processed row -> rays whose zero set contains it
        let mut index: std::collections::HashMap<u32, Vec<usize>> = std::collections::HashMap::new();
        for (k, r) in rays.iter().enumerate() {
            for z in &r.zeros {
                index.entry(*z).or_default().push(k);
            }
        }
        let is_pos: Vec<bool> = vals.iter().map(|v| *v > zero_tol).collect();

        let mut new_rays = Vec::new();
        let mut counts = vec![0usize; rays.len()];
        for &q in &neg {
            let mut touched = Vec::new();
            for z in &rays[q].zeros {
                if let Some(list) = index.get(z) {
                    for &p in list {
                        if is_pos[p] {
                            if counts[p] == 0 {
                                touched.push(p);
                            }
                            counts[p] += 1;
                        }
                    }
                }
            }
            for &p in &touched {
                if counts[p] + 1 >= d - 1 {
                    let common = sorted_intersection(&rays[p].zeros, &rays[q].zeros);
                    if common.len() + 1 >= d - 1 && adjacent(&rays, &index, &common, p, q) {
                        let (vp, vq) = (vals[p], vals[q]);
                        let mut y: Vec<f64> = rays[q]
                            .y
                            .iter()
                            .zip(&rays[p].y)
                            .map(|(yq, yp)| vp * yq - vq * yp)
                            .collect();
                        rescale(&mut y, len_scale);
                        let mut zeros = common;
                        zeros.push(row_idx as u32);
                        zeros.sort_unstable();
                        new_rays.push(Ray { y, zeros });
                    }
                }
                counts[p] = 0;
            }
        }

        let mut kept: Vec<Ray> = Vec::with_capacity(rays.len() + new_rays.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if vals[k] < -zero_tol {
                continue;
            }
            if vals[k] <= zero_tol {
                r.zeros.push(row_idx as u32);
                r.zeros.sort_unstable();
            }
            kept.push(r);
        }
        kept.extend(new_rays);
        rays = kept;
    }

    let mut vertices = Vec::with_capacity(rays.len());
    for r in rays {
        let t = r.y[n];
        if t <= zero_tol / len_scale {
            return Err(GeometryError::Unbounded);
        }
        vertices.push(r.y[..n].iter().map(|x| x / t).collect());
    }
    Ok(vertices)
}

/// Combinatorial adjacency: no third ray's zero set contains the common zeros.
fn adjacent(
    rays: &[Ray],
    index: &std::collections::HashMap<u32, Vec<usize>>,
    common: &[u32],
    p: usize,
    q: usize,
) -> bool {
    let Some(first) = common
        .iter()
        .filter_map(|z| index.get(z))
        .min_by_key(|l| l.len())
    else {
        return rays.len() == 2;
    };
    !first
        .iter()
        .any(|&r| r != p && r != q && is_subset(common, &rays[r].zeros))
}
