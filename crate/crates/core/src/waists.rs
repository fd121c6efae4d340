//! Fibers of linear maps `α: R^n → R^k` restricted to a polytope: how many
//! open and closed `l`-faces one fiber can meet, and the coangle sums of the
//! `k`-faces it meets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{coangle, CoangleMethod, FaceLattice, GeometryError, HPolytope};
use crate::linalg::{dot, norm, orthonormal_basis, rank, sub};
use crate::lp::{LinearProgram, LpOutcome, Relation};

#[derive(Debug, Error, PartialEq)]
pub enum WaistError {
    #[error("NonSurjective: the map has rank {rank} < {k}")]
    NonSurjective { rank: usize, k: usize },
    #[error("InvalidMap: {0}")]
    InvalidMap(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Rows of a `k × n` matrix with orthonormal rows, uniformly rotated.
pub fn generic_map(n: usize, k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let rows: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect()).collect();
        let basis = orthonormal_basis(&rows, 1e-9);
        if basis.len() == k {
            return basis;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    /// uniform in `α(P)`, away from images of `(k-1)`-faces
    Uniform,
    /// image of a vertex
    Vertex,
    /// crossing of two edge images (`k = 2`)
    Crossing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberRow {
    pub xi: Vec<f64>,
    pub kind: SampleKind,
    /// lattice ids of the closed faces met
    pub closed: Vec<usize>,
    /// lattice ids of the faces whose relative interior is met
    pub open: Vec<usize>,
    pub closed_coangle_sum: f64,
    pub open_coangle_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberProbe {
    pub map: Vec<Vec<f64>>,
    pub face_dim: usize,
    pub rows: Vec<FiberRow>,
    /// uniform draws discarded for landing near a face-image boundary
    pub rejected: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    pub uniform: usize,
    /// add vertex images and edge-image crossings, where closed counts peak
    pub critical: bool,
    pub seed: u64,
}

struct Fiber<'a> {
    p: &'a HPolytope,
    lattice: &'a FaceLattice,
    map: &'a [Vec<f64>],
    tol: f64,
}

impl Fiber<'_> {
    fn program(&self, objective: Vec<f64>, xi: &[f64]) -> LinearProgram {
        let mut lp = LinearProgram::maximize(objective);
        for (row, x) in self.map.iter().zip(xi) {
            let mut r = row.clone();
            r.push(0.0);
            lp.row(r, Relation::Eq, *x);
        }
        lp
    }

    /// Smallest uniform relaxation under which the fiber meets the closed
    /// face cut out by `active` (the whole polytope when empty).
    fn closed_gap(&self, active: &[usize], xi: &[f64]) -> f64 {
        let n = self.p.dim();
        let mut obj = vec![0.0; n + 1];
        obj[n] = -1.0;
        let mut lp = self.program(obj, xi);
        for (i, h) in self.p.halfspaces().iter().enumerate() {
            let mut r = h.normal.clone();
            r.push(-1.0);
            lp.row(r, Relation::Le, h.offset);
            if active.contains(&i) {
                let mut r: Vec<f64> = h.normal.iter().map(|x| -x).collect();
                r.push(-1.0);
                lp.row(r, Relation::Le, -h.offset);
            }
        }
        match lp.bound(n, 0.0, f64::INFINITY).solve() {
            LpOutcome::Optimal { value, .. } => -value,
            _ => f64::INFINITY,
        }
    }

    fn meets_closed(&self, face: usize, xi: &[f64]) -> bool {
        self.closed_gap(&self.lattice.faces[face].active, xi) <= self.tol
    }

    /// Depth of the fiber inside the relative interior of the face.
    fn open_depth(&self, face: usize, xi: &[f64]) -> f64 {
        let n = self.p.dim();
        let active = &self.lattice.faces[face].active;
        let mut obj = vec![0.0; n + 1];
        obj[n] = 1.0;
        let mut lp = self.program(obj, xi);
        for (i, h) in self.p.halfspaces().iter().enumerate() {
            let mut r = h.normal.clone();
            if active.contains(&i) {
                r.push(0.0);
                lp.row(r.clone(), Relation::Le, h.offset + self.tol);
                lp.row(r, Relation::Ge, h.offset - self.tol);
            } else {
                r.push(1.0);
                lp.row(r, Relation::Le, h.offset);
            }
        }
        match lp.bound(n, f64::NEG_INFINITY, 1.0).solve() {
            LpOutcome::Optimal { value, .. } => value,
            _ => f64::NEG_INFINITY,
        }
    }

    fn meets_open(&self, face: usize, xi: &[f64]) -> bool {
        self.open_depth(face, xi) > self.tol
    }
}

fn apply(map: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    map.iter().map(|r| dot(r, x)).collect()
}

fn point_segment_2d(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(&ab, &ab);
    let t = if len2 > 0.0 { (dot(&sub(p, a), &ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    norm(&sub(p, &crate::linalg::axpy(a, t, &ab)))
}

/// Proper crossing point of segments `ab` and `cd` in the plane.
fn crossing(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Option<Vec<f64>> {
    let (r, s) = (sub(b, a), sub(d, c));
    let denom = r[0] * s[1] - r[1] * s[0];
    if denom.abs() < 1e-14 {
        return None;
    }
    let q = sub(c, a);
    let t = (q[0] * s[1] - q[1] * s[0]) / denom;
    let u = (q[0] * r[1] - q[1] * r[0]) / denom;
    let inner = 1e-9..=1.0 - 1e-9;
    (inner.contains(&t) && inner.contains(&u)).then(|| crate::linalg::axpy(a, t, &r))
}

/// Samples `ξ ∈ α(P)` and lists the `face_dim`-faces each fiber meets.
pub fn probe_fibers(
    p: &HPolytope,
    lattice: &FaceLattice,
    map: &[Vec<f64>],
    face_dim: usize,
    opts: ProbeOptions,
) -> Result<FiberProbe, WaistError> {
    let n = p.dim();
    let k = map.len();
    if k == 0 || k >= n || map.iter().any(|r| r.len() != n) {
        return Err(WaistError::InvalidMap(format!("expected a k × {n} matrix with 0 < k < {n}")));
    }
    let r = rank(map, 1e-9);
    if r < k {
        return Err(WaistError::NonSurjective { rank: r, k });
    }
    if face_dim >= n {
        return Err(WaistError::InvalidMap(format!("face dimension {face_dim} must be below {n}")));
    }
    let tol = p.lp_tolerance().max(1e-9) * 10.0;
    let fiber = Fiber { p, lattice, map, tol };
    let images: Vec<Vec<f64>> = lattice.vertex_coords.iter().map(|v| apply(map, v)).collect();
    let edges: Vec<(usize, usize)> = lattice.by_dim[1]
        .iter()
        .map(|f| (lattice.faces[*f].vertices[0], lattice.faces[*f].vertices[1]))
        .collect();

    let mut samples: Vec<(Vec<f64>, SampleKind)> = Vec::new();
    let mut rejected = 0;
    let lo: Vec<f64> = (0..k).map(|j| images.iter().map(|v| v[j]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..k).map(|j| images.iter().map(|v| v[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let margin = 1e-6 * p.scale();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut drawn = 0;
    while drawn < opts.uniform {
        let xi: Vec<f64> = (0..k).map(|j| rng.gen_range(lo[j]..=hi[j])).collect();
        if fiber.closed_gap(&[], &xi) > tol {
            continue;
        }
        let near = match k {
            1 => images.iter().any(|v| (v[0] - xi[0]).abs() < margin),
            2 => edges.iter().any(|(a, b)| point_segment_2d(&xi, &images[*a], &images[*b]) < margin),
            _ => false,
        };
        if near {
            rejected += 1;
            continue;
        }
        drawn += 1;
        samples.push((xi, SampleKind::Uniform));
    }
    if opts.critical {
        samples.extend(images.iter().map(|v| (v.clone(), SampleKind::Vertex)));
        if k == 2 {
            for i in 0..edges.len() {
                for j in i + 1..edges.len() {
                    let (a, b) = edges[i];
                    let (c, d) = edges[j];
                    if [a, b].iter().any(|v| *v == c || *v == d) {
                        continue;
                    }
                    if let Some(x) = crossing(&images[a], &images[b], &images[c], &images[d]) {
                        samples.push((x, SampleKind::Crossing));
                    }
                }
            }
        }
    }

    let faces = &lattice.by_dim[face_dim];
    let coangles: Vec<f64> = if face_dim + 1 < n {
        faces
            .iter()
            .map(|f| coangle(p, lattice, *f, CoangleMethod::Exact, 20_000, opts.seed).map(|c| c.value))
            .collect::<Result<_, _>>()?
    } else {
        vec![0.0; faces.len()]
    };
    let rows = samples
        .into_par_iter()
        .map(|(xi, kind)| {
            let mut row = FiberRow {
                xi,
                kind,
                closed: Vec::new(),
                open: Vec::new(),
                closed_coangle_sum: 0.0,
                open_coangle_sum: 0.0,
            };
            for (idx, &f) in faces.iter().enumerate() {
                if fiber.meets_closed(f, &row.xi) {
                    row.closed.push(f);
                    row.closed_coangle_sum += coangles[idx];
                    if fiber.meets_open(f, &row.xi) {
                        row.open.push(f);
                        row.open_coangle_sum += coangles[idx];
                    }
                }
            }
            row
        })
        .collect();
    Ok(FiberProbe { map: map.to_vec(), face_dim, rows, rejected })
}

impl FiberProbe {
    /// `(⌣#, ⌂#)`: the most open and closed faces met by one sampled fiber.
    pub fn overlap_counts(&self) -> (usize, usize) {
        let open = self.rows.iter().map(|r| r.open.len()).max().unwrap_or(0);
        let closed = self.rows.iter().map(|r| r.closed.len()).max().unwrap_or(0);
        (open, closed)
    }

    /// Largest open and closed coangle sums over sampled fibers.
    pub fn coangle_sums(&self) -> (f64, f64) {
        let open = self.rows.iter().map(|r| r.open_coangle_sum).fold(0.0, f64::max);
        let closed = self.rows.iter().map(|r| r.closed_coangle_sum).fold(0.0, f64::max);
        (open, closed)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("xi,kind,open_count,closed_count,open_coangle_sum,closed_coangle_sum\n");
        for r in &self.rows {
            let xi: Vec<String> = r.xi.iter().map(|x| x.to_string()).collect();
            let kind = match r.kind {
                SampleKind::Uniform => "uniform",
                SampleKind::Vertex => "vertex",
                SampleKind::Crossing => "crossing",
            };
            out.push_str(&format!(
                "{},{kind},{},{},{},{}\n",
                xi.join(" "),
                r.open.len(),
                r.closed.len(),
                r.open_coangle_sum,
                r.closed_coangle_sum
            ));
        }
        out
    }
}
