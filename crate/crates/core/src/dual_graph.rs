//! The facet-adjacency graph of a polytope (the edge graph of its dual
//! tessellation) with combinatorial and angular edge weights.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{enumerate_faces, FaceLattice, GeometryError, HPolytope};
use crate::linalg::arc;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("Disconnected: vertex {0} is unreachable from vertex 0")]
    Disconnected(usize),
    #[error("NonpositiveWeight: edge ({0}, {1}) has weight {2}")]
    NonpositiveWeight(usize, usize, f64),
    #[error("InvalidDescription: {0}")]
    InvalidDescription(String),
    #[error("InvalidVertex: {0}")]
    InvalidVertex(usize),
    #[error("EmptyFaceSet")]
    EmptyFaceSet,
    #[error("MissingAngularWeight: edge ({0}, {1}) has no angular weight")]
    MissingAngularWeight(usize, usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Geometric,
    Abstract,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weight {
    Comb,
    Angular,
}

impl std::str::FromStr for Weight {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "comb" => Ok(Weight::Comb),
            "angular" => Ok(Weight::Angular),
            _ => Err(format!("unknown weight `{s}` (expected comb or angular)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphVertex {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub i: usize,
    pub j: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_ang: Option<f64>,
}

/// Wire format shared by import and export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDescription {
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<GraphEdge>,
}

/// Connected graph on facet ids `0..n` with `i < j` on every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeGraph {
    normals: Vec<Option<Vec<f64>>>,
    edges: Vec<GraphEdge>,
    /// (neighbour, edge index)
    adjacency: Vec<Vec<(usize, usize)>>,
    provenance: Provenance,
}

/// Builds the graph from a polytope: one vertex per facet, one edge per ridge.
pub fn build_edge_graph(p: &HPolytope) -> Result<EdgeGraph, GraphError> {
    let lattice = enumerate_faces(p)?;
    Ok(edge_graph_from_lattice(p, &lattice))
}

pub fn edge_graph_from_lattice(p: &HPolytope, lattice: &FaceLattice) -> EdgeGraph {
    let mut edges: Vec<GraphEdge> = lattice
        .ridges()
        .into_iter()
        .map(|(i, j, _)| GraphEdge {
            i,
            j,
            w_ang: Some(arc(p.normal(i), p.normal(j))),
        })
        .collect();
    edges.sort_by_key(|e| (e.i, e.j));
    let normals = (0..p.facet_count()).map(|i| Some(p.normal(i).to_vec())).collect();
    EdgeGraph::assemble(normals, edges, Provenance::Geometric)
}

/// Graph on unit normals with the given adjacency and angular weights.
pub(crate) fn graph_from_normals(normals: Vec<Vec<f64>>, pairs: impl IntoIterator<Item = (usize, usize)>) -> EdgeGraph {
    let mut edges: Vec<GraphEdge> = pairs
        .into_iter()
        .map(|(a, b)| GraphEdge { i: a.min(b), j: a.max(b), w_ang: Some(arc(&normals[a], &normals[b])) })
        .collect();
    edges.sort_by_key(|e| (e.i, e.j));
    edges.dedup_by_key(|e| (e.i, e.j));
    EdgeGraph::assemble(normals.into_iter().map(Some).collect(), edges, Provenance::Geometric)
}

/// Validates and imports a user-supplied graph.
///
/// Vertex ids must be exactly `0..n` in some order.
pub fn ingest_abstract_graph(desc: &GraphDescription) -> Result<EdgeGraph, GraphError> {
    let n = desc.vertices.len();
    if n == 0 {
        return Err(GraphError::InvalidDescription("no vertices".into()));
    }
    let mut normals: Vec<Option<Option<Vec<f64>>>> = vec![None; n];
    for v in &desc.vertices {
        if v.id >= n {
            return Err(GraphError::InvalidDescription(format!(
                "vertex id {} out of range 0..{n}",
                v.id
            )));
        }
        if normals[v.id].is_some() {
            return Err(GraphError::InvalidDescription(format!("duplicate vertex id {}", v.id)));
        }
        normals[v.id] = Some(v.normal.clone());
    }
    let normals: Vec<Option<Vec<f64>>> = normals.into_iter().map(Option::flatten).collect();

    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::with_capacity(desc.edges.len());
    for e in &desc.edges {
        if e.i >= n || e.j >= n {
            return Err(GraphError::InvalidDescription(format!(
                "edge ({}, {}) references a missing vertex",
                e.i, e.j
            )));
        }
        if e.i == e.j {
            return Err(GraphError::InvalidDescription(format!("self-loop at {}", e.i)));
        }
        if let Some(w) = e.w_ang {
            if !(w > 0.0 && w.is_finite()) {
                return Err(GraphError::NonpositiveWeight(e.i, e.j, w));
            }
        }
        let (i, j) = (e.i.min(e.j), e.i.max(e.j));
        if !seen.insert((i, j)) {
            return Err(GraphError::InvalidDescription(format!("duplicate edge ({i}, {j})")));
        }
        edges.push(GraphEdge { i, j, w_ang: e.w_ang });
    }
    let g = EdgeGraph::assemble(normals, edges, Provenance::Abstract);
    let d = g.bfs(&[0]);
    if let Some(v) = d.iter().position(|x| *x == usize::MAX) {
        return Err(GraphError::Disconnected(v));
    }
    Ok(g)
}

#[derive(Clone, Copy, PartialEq)]
struct State(f64, usize);

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| self.1.cmp(&other.1))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl EdgeGraph {
    fn assemble(normals: Vec<Option<Vec<f64>>>, edges: Vec<GraphEdge>, provenance: Provenance) -> Self {
        let mut adjacency = vec![Vec::new(); normals.len()];
        for (k, e) in edges.iter().enumerate() {
            adjacency[e.i].push((e.j, k));
            adjacency[e.j].push((e.i, k));
        }
        EdgeGraph { normals, edges, adjacency, provenance }
    }

    pub fn vertex_count(&self) -> usize {
        self.normals.len()
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn normal(&self, v: usize) -> Option<&[f64]> {
        self.normals[v].as_deref()
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().map(|(u, _)| *u)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].iter().any(|(u, _)| *u == b)
    }

    pub fn has_angular_weights(&self) -> bool {
        self.edges.iter().all(|e| e.w_ang.is_some())
    }

    /// Smallest and largest angular edge weight.
    pub fn angular_range(&self) -> Option<(f64, f64)> {
        let mut it = self.edges.iter().map(|e| e.w_ang);
        let first = it.next()??;
        it.try_fold((first, first), |(lo, hi), w| w.map(|w| (lo.min(w), hi.max(w))))
    }

    pub fn description(&self) -> GraphDescription {
        GraphDescription {
            vertices: self
                .normals
                .iter()
                .enumerate()
                .map(|(id, normal)| GraphVertex { id, normal: normal.clone() })
                .collect(),
            edges: self.edges.clone(),
        }
    }

    fn check_set(&self, set: &[usize]) -> Result<(), GraphError> {
        if set.is_empty() {
            return Err(GraphError::EmptyFaceSet);
        }
        match set.iter().find(|v| **v >= self.vertex_count()) {
            Some(v) => Err(GraphError::InvalidVertex(*v)),
            None => Ok(()),
        }
    }

    fn check_weight(&self, weight: Weight) -> Result<(), GraphError> {
        if weight == Weight::Angular {
            if let Some(e) = self.edges.iter().find(|e| e.w_ang.is_none()) {
                return Err(GraphError::MissingAngularWeight(e.i, e.j));
            }
        }
        Ok(())
    }

    fn bfs(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for (u, _) in &self.adjacency[v] {
                if dist[*u] == usize::MAX {
                    dist[*u] = dist[v] + 1;
                    queue.push_back(*u);
                }
            }
        }
        dist
    }

    fn dijkstra(&self, sources: &[usize]) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.vertex_count()];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0.0;
            heap.push(State(0.0, s));
        }
        while let Some(State(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(u, k) in &self.adjacency[v] {
                let nd = d + self.edges[k].w_ang.unwrap_or(f64::INFINITY);
                if nd < dist[u] {
                    dist[u] = nd;
                    heap.push(State(nd, u));
                }
            }
        }
        dist
    }

    /// Distances from the nearest vertex of `sources` to every vertex.
    pub fn distances_from(&self, sources: &[usize], weight: Weight) -> Result<Vec<f64>, GraphError> {
        self.check_set(sources)?;
        self.check_weight(weight)?;
        Ok(match weight {
            Weight::Comb => self
                .bfs(sources)
                .into_iter()
                .map(|d| if d == usize::MAX { f64::INFINITY } else { d as f64 })
                .collect(),
            Weight::Angular => self.dijkstra(sources),
        })
    }

    /// Shortest-path distance between two facet sets; zero iff they share a facet.
    pub fn distance(&self, a: &[usize], b: &[usize], weight: Weight) -> Result<f64, GraphError> {
        self.check_set(b)?;
        let d = self.distances_from(a, weight)?;
        Ok(b.iter().map(|v| d[*v]).fold(f64::INFINITY, f64::min))
    }

    /// All-pairs distance matrix, rows computed in parallel.
    pub fn distance_matrix(&self, weight: Weight) -> Result<Vec<Vec<f64>>, GraphError> {
        self.check_weight(weight)?;
        Ok((0..self.vertex_count())
            .into_par_iter()
            .map(|s| self.distances_from(&[s], weight).expect("validated"))
            .collect())
    }

    pub fn diameter(&self, weight: Weight) -> Result<f64, GraphError> {
        Ok(self
            .distance_matrix(weight)?
            .iter()
            .flatten()
            .fold(0.0, |m, d| f64::max(m, *d)))
    }

    pub fn distance_matrix_csv(&self, weight: Weight) -> Result<String, GraphError> {
        let m = self.distance_matrix(weight)?;
        let mut out = String::from("facet");
        for j in 0..m.len() {
            out.push_str(&format!(",{j}"));
        }
        out.push('\n');
        for (i, row) in m.iter().enumerate() {
            out.push_str(&i.to_string());
            for d in row {
                out.push_str(&format!(",{d}"));
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// Side of the unit cube that a square of the subdivided surface lies on:
/// `(axis, upper)` means the face `x_axis = N` when `upper`, else `x_axis = 0`.
pub type CubeSide = (usize, bool);

/// The cube surface with every 2-face cut into `n × n` squares; vertices are
/// squares, joined when they share an edge.
pub fn subdivided_cube_graph(n: usize) -> Result<(EdgeGraph, Vec<CubeSide>), GraphError> {
    if n == 0 {
        return Err(GraphError::InvalidDescription("subdivision must be at least 1".into()));
    }
    type Point = [usize; 3];
    let mut sides = Vec::with_capacity(6 * n * n);
    let mut by_segment: HashMap<(Point, Point), Vec<usize>> = HashMap::new();
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for upper in [false, true] {
            for a in 0..n {
                for b in 0..n {
                    let id = sides.len();
                    sides.push((axis, upper));
                    let corner = |da: usize, db: usize| {
                        let mut p = [0; 3];
                        p[axis] = if upper { n } else { 0 };
                        p[u] = a + da;
                        p[v] = b + db;
                        p
                    };
                    let ring = [corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)];
                    for k in 0..4 {
                        let (p, q) = (ring[k], ring[(k + 1) % 4]);
                        by_segment.entry((p.min(q), p.max(q))).or_default().push(id);
                    }
                }
            }
        }
    }
    let mut edges: Vec<GraphEdge> = by_segment
        .into_values()
        .map(|s| {
            debug_assert_eq!(s.len(), 2);
            GraphEdge { i: s[0].min(s[1]), j: s[0].max(s[1]), w_ang: None }
        })
        .collect();
    edges.sort_by_key(|e| (e.i, e.j));
    let desc = GraphDescription {
        vertices: (0..sides.len()).map(|id| GraphVertex { id, normal: None }).collect(),
        edges,
    };
    Ok((ingest_abstract_graph(&desc)?, sides))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;
    use std::f64::consts::PI;

    /// Minimum weight over all simple paths, by exhaustive enumeration.
    fn brute_force(g: &EdgeGraph, a: usize, b: usize, weight: Weight) -> f64 {
        fn walk(g: &EdgeGraph, v: usize, b: usize, w: Weight, seen: &mut Vec<bool>, acc: f64, best: &mut f64) {
            if v == b {
                *best = best.min(acc);
                return;
            }
            for &(u, k) in &g.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    let step = match w {
                        Weight::Comb => 1.0,
                        Weight::Angular => g.edges[k].w_ang.unwrap(),
                    };
                    walk(g, u, b, w, seen, acc + step, best);
                    seen[u] = false;
                }
            }
        }
        let mut seen = vec![false; g.vertex_count()];
        seen[a] = true;
        let mut best = f64::INFINITY;
        walk(g, a, b, weight, &mut seen, 0.0, &mut best);
        best
    }

    #[test]
    fn cube_graph() {
        let g = build_edge_graph(&shapes::cube(3)).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edges().len(), 12);
        for e in g.edges() {
            assert!((e.w_ang.unwrap() - PI / 2.0).abs() < 1e-12);
        }
        assert_eq!(g.distance(&[0], &[1], Weight::Comb).unwrap(), 2.0);
        assert!((g.distance(&[0], &[1], Weight::Angular).unwrap() - PI).abs() < 1e-12);
        assert_eq!(g.diameter(Weight::Comb).unwrap(), 2.0);
        assert!((g.diameter(Weight::Angular).unwrap() - PI).abs() < 1e-12);
        assert_eq!(g.distance(&[3], &[3], Weight::Angular).unwrap(), 0.0);
        assert_eq!(g.provenance(), Provenance::Geometric);
    }

    #[test]
    fn simplex_is_complete() {
        let g = build_edge_graph(&shapes::regular_simplex(3)).unwrap();
        assert_eq!(g.edges().len(), 6);
        let want = (-1.0f64 / 3.0).acos();
        assert!(g.edges().iter().all(|e| (e.w_ang.unwrap() - want).abs() < 1e-12));
        assert_eq!(g.diameter(Weight::Comb).unwrap(), 1.0);
    }

    #[test]
    fn dodecahedron_weights() {
        let g = build_edge_graph(&shapes::dodecahedron()).unwrap();
        assert_eq!((g.vertex_count(), g.edges().len()), (12, 30));
        // adjacent icosahedron vertices (0, ±1, φ) meet at cos = (φ² − 1)/(φ² + 1)
        let phi: f64 = (1.0 + 5f64.sqrt()) / 2.0;
        let oracle = ((phi * phi - 1.0) / (phi * phi + 1.0)).acos();
        for e in g.edges() {
            let w = e.w_ang.unwrap();
            assert!((w - oracle).abs() < 1e-9);
            assert!((w - (PI - 2.034444)).abs() < 1e-6);
        }
    }

    #[test]
    fn shortest_paths_match_enumeration() {
        let shapes = [
            shapes::square_pyramid(0.7),
            shapes::prism(5, 0.4),
            shapes::truncate(&shapes::cube(3), &[1.0, 1.0, 1.0], &[0.0; 3], 0.5).unwrap(),
        ];
        for p in &shapes {
            let g = build_edge_graph(p).unwrap();
            assert!(g.vertex_count() <= 10);
            for a in 0..g.vertex_count() {
                for b in 0..g.vertex_count() {
                    for w in [Weight::Comb, Weight::Angular] {
                        let d = g.distance(&[a], &[b], w).unwrap();
                        assert!((d - brute_force(&g, a, b, w)).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn set_distance_is_min_over_members() {
        let g = build_edge_graph(&shapes::prism(6, 1.0)).unwrap();
        let (a, b) = ([2, 3], [5, 6, 0]);
        for w in [Weight::Comb, Weight::Angular] {
            let d = g.distance(&a, &b, w).unwrap();
            let m = a
                .iter()
                .flat_map(|x| b.iter().map(move |y| (*x, *y)))
                .map(|(x, y)| g.distance(&[x], &[y], w).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert_eq!(d, m);
        }
        assert_eq!(g.distance(&[1, 2], &[2, 4], Weight::Angular).unwrap(), 0.0);
    }

    #[test]
    fn abstract_ingestion() {
        let one_edge = GraphDescription {
            vertices: vec![GraphVertex { id: 1, normal: None }, GraphVertex { id: 0, normal: None }],
            edges: vec![GraphEdge { i: 1, j: 0, w_ang: Some(0.5) }],
        };
        let g = ingest_abstract_graph(&one_edge).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.provenance(), Provenance::Abstract);
        assert_eq!(g.distance(&[0], &[1], Weight::Angular).unwrap(), 0.5);

        let mut negative = one_edge.clone();
        negative.edges[0].w_ang = Some(-1.0);
        assert_eq!(
            ingest_abstract_graph(&negative),
            Err(GraphError::NonpositiveWeight(1, 0, -1.0))
        );

        let mut split = one_edge.clone();
        split.vertices.push(GraphVertex { id: 2, normal: None });
        assert_eq!(ingest_abstract_graph(&split), Err(GraphError::Disconnected(2)));

        let mut unweighted = one_edge;
        unweighted.edges[0].w_ang = None;
        let g = ingest_abstract_graph(&unweighted).unwrap();
        assert_eq!(g.distance(&[0], &[1], Weight::Comb).unwrap(), 1.0);
        assert!(matches!(
            g.distance(&[0], &[1], Weight::Angular),
            Err(GraphError::MissingAngularWeight(0, 1))
        ));
    }

    #[test]
    fn json_round_trip() {
        let g = build_edge_graph(&shapes::cube(3)).unwrap();
        let s = serde_json::to_string(&g.description()).unwrap();
        let h = ingest_abstract_graph(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(g.edges(), h.edges());
        assert_eq!(h.diameter(Weight::Angular).unwrap(), g.diameter(Weight::Angular).unwrap());
    }

    #[test]
    fn subdivided_cube() {
        for n in 1..=5 {
            let (g, sides) = subdivided_cube_graph(n).unwrap();
            assert_eq!(g.vertex_count(), 6 * n * n);
            // each square has four edge neighbours
            assert_eq!(g.edges().len(), 12 * n * n);
            for axis in 0..3 {
                let lo: Vec<usize> = (0..sides.len()).filter(|s| sides[*s] == (axis, false)).collect();
                let hi: Vec<usize> = (0..sides.len()).filter(|s| sides[*s] == (axis, true)).collect();
                assert_eq!(g.distance(&lo, &hi, Weight::Comb).unwrap(), (n + 1) as f64);
            }
        }
    }

    #[test]
    fn csv_export() {
        let g = build_edge_graph(&shapes::cube(3)).unwrap();
        let csv = g.distance_matrix_csv(Weight::Comb).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[0], "facet,0,1,2,3,4,5");
        assert_eq!(lines[1], "0,0,2,1,1,1,1");
    }
}
