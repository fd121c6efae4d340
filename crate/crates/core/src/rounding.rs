//! The boundary of the ε-neighbourhood of a simple 3-polytope, meshed
//! stratum by stratum, with edges weighted by length times mean curvature.
//!
//! Flat patches over facets have mean curvature 0, cylinder strips over
//! edges `1/ε` and sphere patches over vertices `2/ε`. Shortest paths in the
//! weighted mesh approximate the distance of the metric `H² g`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dual_graph::{edge_graph_from_lattice, GraphError, Weight};
use crate::geometry::{enumerate_faces, is_simple, FaceLattice, GeometryError, HPolytope};
use crate::linalg::{arc, axpy, dot, norm, normalized, sub};

#[derive(Debug, Error, PartialEq)]
pub enum RoundingError {
    #[error("EpsilonTooLarge: ε = {epsilon} must be below {bound} (half the distance between disjoint faces)")]
    EpsilonTooLarge { epsilon: f64, bound: f64 },
    #[error("NotSimple: rounding needs a simple polytope; perturb it first")]
    NotSimple,
    #[error("InvalidResolution: {0}")]
    InvalidResolution(f64),
    #[error("InvalidFacet: {0}")]
    InvalidFacet(usize),
    #[error("EmptySet: the vertex set selects no mesh vertex")]
    EmptySet,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshVertex {
    pub position: [f64; 3],
    /// dimension `k` of the source face whose pullback holds the vertex
    pub stratum: u8,
    /// lattice id of the nearest source face
    pub face: usize,
    /// mean curvature `(2 - k) / ε`
    pub h: f64,
    /// outward unit normal of the rounded boundary
    pub normal: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshEdge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
    /// length times the mean of the endpoint curvatures
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct RoundedMesh {
    pub source: HPolytope,
    pub lattice: FaceLattice,
    pub epsilon: f64,
    pub vertices: Vec<MeshVertex>,
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<MeshEdge>,
    /// largest angle between the normals two strata assign to a seam point
    pub seam_defect: f64,
    adjacency: Vec<Vec<(usize, usize)>>,
}

/// Relative size of the flat collar that keeps seam curvature off flat edges.
const COLLAR: f64 = 1e-3;
const WELD: f64 = 1e-6;

struct RawPoint {
    position: [f64; 3],
    stratum: u8,
    face: usize,
    normal: [f64; 3],
}

#[derive(Default)]
struct Piece {
    points: Vec<RawPoint>,
    triangles: Vec<[usize; 3]>,
}

fn arr(v: &[f64]) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    axpy(a, t, &sub(b, a))
}

/// Triangles of an `rows × cols` grid indexed `r * cols + c`.
fn grid_triangles(rows: usize, cols: usize, out: &mut Vec<[usize; 3]>) {
    for r in 0..rows - 1 {
        for c in 0..cols - 1 {
            let (p, q, s, t) = (r * cols + c, r * cols + c + 1, (r + 1) * cols + c, (r + 1) * cols + c + 1);
            out.push([p, q, t]);
            out.push([p, t, s]);
        }
    }
}

/// Vertices of a facet in cyclic order.
fn facet_polygon(p: &HPolytope, lattice: &FaceLattice, facet: usize) -> Vec<usize> {
    let mut vs = lattice.faces[lattice.facet_face(facet)].vertices.clone();
    let pts: Vec<&[f64]> = vs.iter().map(|v| lattice.vertex_coords[*v].as_slice()).collect();
    let c = crate::linalg::centroid(&pts);
    let u = p.normal(facet);
    let e1 = normalized(&sub(pts[0], &c));
    let e2 = crate::linalg::cross(u, &e1);
    vs.sort_by(|a, b| {
        let angle = |v: &usize| {
            let d = sub(&lattice.vertex_coords[*v], &c);
            dot(&d, &e2).atan2(dot(&d, &e1))
        };
        angle(a).total_cmp(&angle(b))
    });
    vs
}

fn point_segment(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(&ab, &ab);
    let t = if len2 > 0.0 { (dot(&sub(p, a), &ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    norm(&sub(p, &axpy(a, t, &ab)))
}

fn segment_segment(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> f64 {
    let (u, v, w) = (sub(b, a), sub(d, c), sub(a, c));
    let (aa, bb, cc, dd, ee) = (dot(&u, &u), dot(&u, &v), dot(&v, &v), dot(&u, &w), dot(&v, &w));
    let denom = aa * cc - bb * bb;
    let mut best = [point_segment(a, c, d), point_segment(b, c, d), point_segment(c, a, b), point_segment(d, a, b)]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if denom > 1e-14 * aa * cc {
        let s = (bb * ee - cc * dd) / denom;
        let t = (aa * ee - bb * dd) / denom;
        if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t) {
            best = best.min(norm(&sub(&axpy(a, s, &u), &axpy(c, t, &v))));
        }
    }
    best
}

fn point_triangle(p: &[f64], a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let (ab, ac) = (sub(b, a), sub(c, a));
    let n = crate::linalg::cross(&ab, &ac);
    let nn = dot(&n, &n);
    let ap = sub(p, a);
    let inside = [(a, b), (b, c), (c, a)].iter().all(|(x, y)| {
        let e = sub(y, x);
        dot(&crate::linalg::cross(&e, &sub(p, x)), &n) >= 0.0
    });
    if nn > 0.0 && inside {
        return dot(&ap, &n).abs() / nn.sqrt();
    }
    point_segment(p, a, b).min(point_segment(p, b, c)).min(point_segment(p, c, a))
}

/// Points, segments and triangles covering a face of dimension at most 2.
struct FaceShape {
    points: Vec<Vec<f64>>,
    segments: Vec<(Vec<f64>, Vec<f64>)>,
    triangles: Vec<[Vec<f64>; 3]>,
}

fn face_shape(p: &HPolytope, lattice: &FaceLattice, face: usize) -> FaceShape {
    let f = &lattice.faces[face];
    let coords = |v: &usize| lattice.vertex_coords[*v].clone();
    match f.dim {
        2 => {
            let poly: Vec<Vec<f64>> = facet_polygon(p, lattice, f.active[0]).iter().map(coords).collect();
            let k = poly.len();
            FaceShape {
                segments: (0..k).map(|i| (poly[i].clone(), poly[(i + 1) % k].clone())).collect(),
                triangles: (1..k - 1).map(|i| [poly[0].clone(), poly[i].clone(), poly[i + 1].clone()]).collect(),
                points: poly,
            }
        }
        1 => {
            let pts: Vec<Vec<f64>> = f.vertices.iter().map(coords).collect();
            FaceShape { segments: vec![(pts[0].clone(), pts[1].clone())], points: pts, triangles: Vec::new() }
        }
        _ => FaceShape { points: f.vertices.iter().map(coords).collect(), segments: Vec::new(), triangles: Vec::new() },
    }
}

fn shape_distance(x: &FaceShape, y: &FaceShape) -> f64 {
    let mut best = f64::INFINITY;
    for (s, t) in [(x, y), (y, x)] {
        for q in &s.points {
            for r in &t.points {
                best = best.min(norm(&sub(q, r)));
            }
            for (a, b) in &t.segments {
                best = best.min(point_segment(q, a, b));
            }
            for [a, b, c] in &t.triangles {
                best = best.min(point_triangle(q, a, b, c));
            }
        }
    }
    for (a, b) in &x.segments {
        for (c, d) in &y.segments {
            best = best.min(segment_segment(a, b, c, d));
        }
    }
    best
}

/// Smallest distance between two proper faces that share no vertex.
pub fn disjoint_face_distance(p: &HPolytope, lattice: &FaceLattice) -> f64 {
    let proper: Vec<usize> = (0..lattice.faces.len()).filter(|f| lattice.faces[*f].dim < 3).collect();
    let shapes: Vec<FaceShape> = proper.iter().map(|f| face_shape(p, lattice, *f)).collect();
    let mut best = f64::INFINITY;
    for i in 0..proper.len() {
        for j in i + 1..proper.len() {
            let (vi, vj) = (&lattice.faces[proper[i]].vertices, &lattice.faces[proper[j]].vertices);
            if vi.iter().any(|v| vj.contains(v)) {
                continue;
            }
            best = best.min(shape_distance(&shapes[i], &shapes[j]));
        }
    }
    best
}

/// Points `normalize(Σ w_i u_i)` on the spherical simplex spanned by unit normals.
fn sphere_point(normals: &[&[f64]], weights: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; 3];
    for (u, w) in normals.iter().zip(weights) {
        v = axpy(&v, *w, u);
    }
    normalized(&v)
}

struct Plan<'a> {
    p: &'a HPolytope,
    lattice: &'a FaceLattice,
    eps: f64,
    /// target edge length
    step: f64,
    /// angular subdivisions shared by every strip and sphere patch
    m: usize,
}

impl Plan<'_> {
    fn along(&self, a: &[f64], b: &[f64]) -> usize {
        ((norm(&sub(b, a)) / self.step).ceil() as usize).max(1)
    }

    fn strip(&self, edge: usize) -> Piece {
        let f = &self.lattice.faces[edge];
        let (uf, ug) = (self.p.normal(f.active[0]), self.p.normal(f.active[1]));
        let (a, b) = (&self.lattice.vertex_coords[f.vertices[0]], &self.lattice.vertex_coords[f.vertices[1]]);
        let mt = self.along(a, b);
        let mut piece = Piece::default();
        for s in 0..=mt {
            let base = lerp(a, b, s as f64 / mt as f64);
            for j in 0..=self.m {
                let n = sphere_point(&[uf, ug], &[(self.m - j) as f64, j as f64]);
                piece.points.push(RawPoint {
                    position: arr(&axpy(&base, self.eps, &n)),
                    stratum: 1,
                    face: edge,
                    normal: arr(&n),
                });
            }
        }
        grid_triangles(mt + 1, self.m + 1, &mut piece.triangles);
        piece
    }

    fn corner(&self, vertex: usize) -> Piece {
        let face = self.lattice.vertex_face(vertex);
        let us: Vec<&[f64]> = self.lattice.faces[face].active.iter().map(|i| self.p.normal(*i)).collect();
        let v = &self.lattice.vertex_coords[vertex];
        let m = self.m;
        let mut piece = Piece::default();
        let mut index = HashMap::new();
        for i in 0..=m {
            for j in 0..=m - i {
                let n = sphere_point(&us, &[i as f64, j as f64, (m - i - j) as f64]);
                index.insert((i, j), piece.points.len());
                piece.points.push(RawPoint { position: arr(&axpy(v, self.eps, &n)), stratum: 0, face, normal: arr(&n) });
            }
        }
        for i in 0..m {
            for j in 0..m - i {
                piece.triangles.push([index[&(i, j)], index[&(i + 1, j)], index[&(i, j + 1)]]);
                if i + j + 2 <= m {
                    piece.triangles.push([index[&(i + 1, j)], index[&(i + 1, j + 1)], index[&(i, j + 1)]]);
                }
            }
        }
        piece
    }

    /// Boundary samples matching the strips, a thin collar, rings at
    /// fractions 3/4, 1/2, 1/4 about the centroid, and the centroid.
    fn flat(&self, facet: usize) -> Piece {
        let u = self.p.normal(facet);
        let poly: Vec<Vec<f64>> = facet_polygon(self.p, self.lattice, facet)
            .iter()
            .map(|v| axpy(&self.lattice.vertex_coords[*v], self.eps, u))
            .collect();
        let k = poly.len();
        let mut ring = Vec::new();
        for i in 0..k {
            let (a, b) = (&poly[i], &poly[(i + 1) % k]);
            let n = self.along(a, b);
            ring.extend((0..n).map(|s| lerp(a, b, s as f64 / n as f64)));
        }
        let c = crate::linalg::centroid(&poly.iter().map(|x| x.as_slice()).collect::<Vec<_>>());
        let inradius = (0..k)
            .map(|i| point_segment(&c, &poly[i], &poly[(i + 1) % k]))
            .fold(f64::INFINITY, f64::min);
        let face = self.lattice.facet_face(facet);
        let levels = [1.0, 1.0 - COLLAR * self.eps / inradius, 0.75, 0.5, 0.25];
        let mut piece = Piece::default();
        for t in levels {
            for x in &ring {
                piece.points.push(RawPoint { position: arr(&lerp(&c, x, t)), stratum: 2, face, normal: arr(u) });
            }
        }
        let l = ring.len();
        for r in 0..levels.len() - 1 {
            for i in 0..l {
                let (p, q) = (r * l + i, r * l + (i + 1) % l);
                let (s, t) = (p + l, q + l);
                piece.triangles.push([p, q, t]);
                piece.triangles.push([p, t, s]);
            }
        }
        let centre = piece.points.len();
        piece.points.push(RawPoint { position: arr(&c), stratum: 2, face, normal: arr(u) });
        let inner = (levels.len() - 1) * l;
        for i in 0..l {
            piece.triangles.push([inner + i, inner + (i + 1) % l, centre]);
        }
        piece
    }
}

/// Merges points closer than `tol` and keeps the lowest stratum.
struct Welder {
    tol: f64,
    cells: HashMap<[i64; 3], Vec<usize>>,
    vertices: Vec<MeshVertex>,
    defect: f64,
}

impl Welder {
    fn insert(&mut self, p: &RawPoint, eps: f64) -> usize {
        let key = p.position.map(|x| (x / self.tol).floor() as i64);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(ids) = self.cells.get(&[key[0] + dx, key[1] + dy, key[2] + dz]) else { continue };
                    for &id in ids {
                        let v = &mut self.vertices[id];
                        if norm(&sub(&v.position, &p.position)) <= self.tol {
                            self.defect = self.defect.max(arc(&v.normal, &p.normal));
                            if p.stratum < v.stratum {
                                v.stratum = p.stratum;
                                v.face = p.face;
                                v.h = (2 - p.stratum) as f64 / eps;
                            }
                            return id;
                        }
                    }
                }
            }
        }
        let id = self.vertices.len();
        self.vertices.push(MeshVertex {
            position: p.position,
            stratum: p.stratum,
            face: p.face,
            h: (2 - p.stratum) as f64 / eps,
            normal: p.normal,
        });
        self.cells.entry(key).or_default().push(id);
        id
    }
}

/// Meshes the boundary of the `epsilon`-neighbourhood of a simple 3-polytope
/// with edges of length about `resolution * epsilon`.
pub fn round(p: &HPolytope, epsilon: f64, resolution: f64) -> Result<RoundedMesh, RoundingError> {
    if p.dim() != 3 {
        return Err(GeometryError::DimensionMismatch { expected: 3, found: p.dim() }.into());
    }
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(RoundingError::InvalidResolution(resolution));
    }
    let lattice = enumerate_faces(p)?;
    if !is_simple(&lattice) {
        return Err(RoundingError::NotSimple);
    }
    let bound = disjoint_face_distance(p, &lattice) / 2.0;
    if !(epsilon > 0.0 && epsilon < bound) {
        return Err(RoundingError::EpsilonTooLarge { epsilon, bound });
    }
    let widest = lattice
        .ridges()
        .iter()
        .map(|(i, j, _)| arc(p.normal(*i), p.normal(*j)))
        .fold(0.0, f64::max);
    let plan = Plan {
        p,
        lattice: &lattice,
        eps: epsilon,
        step: resolution * epsilon,
        m: ((widest / resolution).ceil() as usize).max(2),
    };
    let pieces: Vec<Piece> = (0..lattice.faces.len())
        .into_par_iter()
        .filter_map(|f| match lattice.faces[f].dim {
            0 => Some(plan.corner(lattice.faces[f].vertices[0])),
            1 => Some(plan.strip(f)),
            2 => Some(plan.flat(lattice.faces[f].active[0])),
            _ => None,
        })
        .collect();

    let mut welder = Welder { tol: WELD * epsilon, cells: HashMap::new(), vertices: Vec::new(), defect: 0.0 };
    let mut triangles = Vec::new();
    for piece in &pieces {
        let ids: Vec<usize> = piece.points.iter().map(|q| welder.insert(q, epsilon)).collect();
        triangles.extend(piece.triangles.iter().map(|t| t.map(|i| ids[i])));
    }
    triangles.retain(|t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2]);
    let vertices = welder.vertices;

    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for t in &triangles {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            if !seen.insert((a.min(b), a.max(b))) {
                continue;
            }
            let length = norm(&sub(&vertices[a].position, &vertices[b].position));
            let weight = length * (vertices[a].h + vertices[b].h) / 2.0;
            adjacency[a].push((b, edges.len()));
            adjacency[b].push((a, edges.len()));
            edges.push(MeshEdge { a, b, length, weight });
        }
    }
    Ok(RoundedMesh {
        source: p.clone(),
        lattice,
        epsilon,
        vertices,
        triangles,
        edges,
        seam_defect: welder.defect,
        adjacency,
    })
}

/// Vertices a distance query starts or ends at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexSet {
    /// nearest mesh vertex to each point
    Points(Vec<[f64; 3]>),
    /// flat vertices over the facet shrunk about its centroid by `shrink`
    FaceInterior { facet: usize, shrink: f64 },
    /// vertices whose normal is closest to the facet normal
    FaceRegion(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRun {
    pub stratum: u8,
    pub face: usize,
    pub nat_length: f64,
    pub euclidean_length: f64,
}

/// Stratum sequence of a shortest path. Each edge is charged to the lower
/// stratum of its endpoints, so collar edges count with the strip they lead to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathReport {
    pub nat_length: f64,
    pub vertices: Vec<usize>,
    pub runs: Vec<PathRun>,
    /// strata carrying positive ♮-length
    pub carrying: Vec<u8>,
    /// strips crossed with positive ♮-length
    pub strips_crossed: usize,
}

impl RoundedMesh {
    pub fn max_edge_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).fold(0.0, f64::max)
    }

    pub fn select(&self, set: &VertexSet) -> Result<Vec<usize>, RoundingError> {
        let check = |f: usize| {
            if f < self.source.facet_count() {
                Ok(())
            } else {
                Err(RoundingError::InvalidFacet(f))
            }
        };
        let ids: Vec<usize> = match set {
            VertexSet::Points(points) => points
                .iter()
                .filter_map(|q| {
                    (0..self.vertices.len()).min_by(|a, b| {
                        let d = |i: &usize| norm(&sub(&self.vertices[*i].position, q));
                        d(a).total_cmp(&d(b))
                    })
                })
                .collect(),
            VertexSet::FaceInterior { facet, shrink } => {
                check(*facet)?;
                let face = self.lattice.facet_face(*facet);
                let pts: Vec<&[f64]> = self.lattice.faces[face]
                    .vertices
                    .iter()
                    .map(|v| self.lattice.vertex_coords[*v].as_slice())
                    .collect();
                let c = crate::linalg::centroid(&pts);
                let u = self.source.normal(*facet);
                (0..self.vertices.len())
                    .filter(|i| {
                        let v = &self.vertices[*i];
                        if v.stratum != 2 || v.face != face {
                            return false;
                        }
                        let x = axpy(&v.position, -self.epsilon, u);
                        self.source.contains(&axpy(&c, 1.0 / shrink, &sub(&x, &c)))
                    })
                    .collect()
            }
            VertexSet::FaceRegion(facet) => {
                check(*facet)?;
                let m = self.source.facet_count();
                (0..self.vertices.len())
                    .filter(|i| {
                        let n = &self.vertices[*i].normal;
                        let own = arc(n, self.source.normal(*facet));
                        (0..m).all(|g| own <= arc(n, self.source.normal(g)) + 1e-9)
                    })
                    .collect()
            }
        };
        if ids.is_empty() {
            return Err(RoundingError::EmptySet);
        }
        Ok(ids)
    }

    fn dijkstra(&self, sources: &[usize]) -> (Vec<f64>, Vec<Option<(usize, usize)>>) {
        let n = self.vertices.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![None; n];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0.0;
            heap.push(Entry(0.0, s));
        }
        while let Some(Entry(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(w, e) in &self.adjacency[v] {
                let nd = d + self.edges[e].weight;
                if nd < dist[w] {
                    dist[w] = nd;
                    pred[w] = Some((v, e));
                    heap.push(Entry(nd, w));
                }
            }
        }
        (dist, pred)
    }

    pub fn nat_distance(&self, src: &VertexSet, dst: &VertexSet) -> Result<f64, RoundingError> {
        Ok(self.path_structure(src, dst)?.nat_length)
    }

    pub fn path_structure(&self, src: &VertexSet, dst: &VertexSet) -> Result<PathReport, RoundingError> {
        let (sources, targets) = (self.select(src)?, self.select(dst)?);
        let (dist, pred) = self.dijkstra(&sources);
        let end = *targets
            .iter()
            .min_by(|a, b| dist[**a].total_cmp(&dist[**b]))
            .expect("selections are nonempty");
        let mut vertices = vec![end];
        let mut path_edges = Vec::new();
        let mut cur = end;
        while let Some((prev, e)) = pred[cur] {
            path_edges.push(e);
            vertices.push(prev);
            cur = prev;
        }
        vertices.reverse();
        path_edges.reverse();

        let mut runs: Vec<PathRun> = Vec::new();
        for e in path_edges {
            let edge = &self.edges[e];
            let (va, vb) = (&self.vertices[edge.a], &self.vertices[edge.b]);
            let low = if va.stratum <= vb.stratum { va } else { vb };
            match runs.last_mut() {
                Some(r) if r.stratum == low.stratum && r.face == low.face => {
                    r.nat_length += edge.weight;
                    r.euclidean_length += edge.length;
                }
                _ => runs.push(PathRun {
                    stratum: low.stratum,
                    face: low.face,
                    nat_length: edge.weight,
                    euclidean_length: edge.length,
                }),
            }
        }
        let mut carrying: Vec<u8> = runs.iter().filter(|r| r.nat_length > 0.0).map(|r| r.stratum).collect();
        carrying.sort_unstable();
        carrying.dedup();
        let strips_crossed = runs.iter().filter(|r| r.stratum == 1 && r.nat_length > 0.0).count();
        Ok(PathReport { nat_length: dist[end], vertices, runs, carrying, strips_crossed })
    }

    /// Indexed triangles with per-vertex stratum and mean curvature.
    pub fn to_text(&self) -> String {
        let mut out = format!("vertices {}\n", self.vertices.len());
        for v in &self.vertices {
            let [x, y, z] = v.position;
            out.push_str(&format!("{x} {y} {z} {} {}\n", v.stratum, v.h));
        }
        out.push_str(&format!("triangles {}\n", self.triangles.len()));
        for [a, b, c] in &self.triangles {
            out.push_str(&format!("{a} {b} {c}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub resolution: f64,
    pub epsilon: f64,
    pub facets: (usize, usize),
    pub nat_distance: f64,
    /// angular distance between the facets in the edge graph
    pub target: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// for every resolution and pair, errors do not grow as ε shrinks
    pub decreasing: bool,
}

impl ConvergenceStudy {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("resolution,epsilon,facet_a,facet_b,nat_distance,target,error\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.resolution, r.epsilon, r.facets.0, r.facets.1, r.nat_distance, r.target, r.error
            ));
        }
        out
    }
}

/// Distances between the centre halves of facet pairs, compared with their
/// angular distance, for every `ε` (largest first) and resolution.
pub fn convergence_study(
    p: &HPolytope,
    epsilons: &[f64],
    pairs: &[(usize, usize)],
    resolutions: &[f64],
) -> Result<ConvergenceStudy, RoundingError> {
    let graph = edge_graph_from_lattice(p, &enumerate_faces(p)?);
    let mut epsilons = epsilons.to_vec();
    epsilons.sort_by(|a, b| b.total_cmp(a));
    let jobs: Vec<(f64, f64)> = resolutions.iter().flat_map(|r| epsilons.iter().map(move |e| (*r, *e))).collect();
    let meshes = jobs
        .par_iter()
        .map(|&(r, e)| round(p, e, r))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for (&(resolution, epsilon), mesh) in jobs.iter().zip(&meshes) {
        for &(a, b) in pairs {
            let target = graph.distance(&[a], &[b], Weight::Angular)?;
            let nat = mesh.nat_distance(
                &VertexSet::FaceInterior { facet: a, shrink: 0.5 },
                &VertexSet::FaceInterior { facet: b, shrink: 0.5 },
            )?;
            rows.push(ConvergenceRow {
                resolution,
                epsilon,
                facets: (a, b),
                nat_distance: nat,
                target,
                error: (nat - target).abs(),
            });
        }
    }
    let decreasing = resolutions.iter().all(|r| {
        pairs.iter().all(|pair| {
            let errs: Vec<f64> = rows
                .iter()
                .filter(|x| x.resolution == *r && x.facets == *pair)
                .map(|x| x.error)
                .collect();
            errs.windows(2).all(|w| w[1] <= w[0] + 1e-9)
        })
    });
    Ok(ConvergenceStudy { rows, decreasing })
}

/// Scales a polytope about the origin.
pub fn scaled(p: &HPolytope, s: f64) -> Result<HPolytope, GeometryError> {
    let id: Vec<Vec<f64>> = (0..p.dim()).map(|i| (0..p.dim()).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    p.transformed(&id, s, &vec![0.0; p.dim()])
}
