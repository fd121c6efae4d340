use std::collections::{BTreeSet, HashMap};

use super::dd::enumerate_vertices;
use super::{GeometryError, HPolytope};
use crate::linalg::{affine_rank, centroid};

const MAX_DIM: usize = 6;
const MAX_FACETS: usize = 2000;
/// Slacks within this multiple of the tolerance are considered ambiguous.
const AMBIGUITY_BAND: f64 = 100.0;

/// A face of the polytope: facets containing it, its vertices and a point
/// in its relative interior.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub dim: usize,
    /// sorted facet ids whose hyperplanes contain the face
    pub active: Vec<usize>,
    /// sorted vertex ids
    pub vertices: Vec<usize>,
    pub witness: Vec<f64>,
}

/// All proper faces of a polytope, dims `0..n-1`, with containment between
/// consecutive dimensions.
#[derive(Debug, Clone)]
pub struct FaceLattice {
    pub dim: usize,
    pub vertex_coords: Vec<Vec<f64>>,
    pub faces: Vec<Face>,
    /// face ids grouped by dimension
    pub by_dim: Vec<Vec<usize>>,
    /// face ids of dimension `dim - 1` contained in each face
    pub children: Vec<Vec<usize>>,
    /// face ids of dimension `dim + 1` containing each face
    pub parents: Vec<Vec<usize>>,
    facet_face: Vec<usize>,
    vertex_face: Vec<usize>,
}

impl FaceLattice {
    pub fn f_vector(&self) -> Vec<usize> {
        self.by_dim.iter().map(|v| v.len()).collect()
    }

    /// Face id of facet (halfspace) `i`.
    pub fn facet_face(&self, i: usize) -> usize {
        self.facet_face[i]
    }

    /// Face id of vertex `v`.
    pub fn vertex_face(&self, v: usize) -> usize {
        self.vertex_face[v]
    }

    pub fn facet_count(&self) -> usize {
        self.facet_face.len()
    }

    /// Pairs of facets sharing an (n-2)-face, with that face's id.
    pub fn ridges(&self) -> Vec<(usize, usize, usize)> {
        if self.dim < 2 {
            return Vec::new();
        }
        self.by_dim[self.dim - 2]
            .iter()
            .map(|&f| {
                let a = &self.faces[f].active;
                (a[0], a[1], f)
            })
            .collect()
    }

    /// Facets that share at least one vertex with facet `i`.
    pub fn touching_facets(&self, i: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &v in &self.faces[self.facet_face[i]].vertices {
            out.extend(self.faces[self.vertex_face[v]].active.iter().copied());
        }
        out.remove(&i);
        out
    }

    /// All faces below `face` (including itself).
    pub fn descendants(&self, face: usize) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![face];
        while let Some(f) = stack.pop() {
            if seen.insert(f) {
                stack.extend(self.children[f].iter().copied());
            }
        }
        seen.into_iter().collect()
    }

    /// Every flag `vertex ⊂ ... ⊂ facet`, as face ids ordered by dimension.
    pub fn flags(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for &v in &self.by_dim[0] {
            let mut stack = vec![vec![v]];
            while let Some(chain) = stack.pop() {
                let last = *chain.last().unwrap();
                if self.faces[last].dim == self.dim - 1 {
                    out.push(chain);
                    continue;
                }
                for &p in &self.parents[last] {
                    let mut c = chain.clone();
                    c.push(p);
                    stack.push(c);
                }
            }
        }
        out
    }
}

/// Enumerates vertices by double description, then the full lattice from
/// vertex-facet incidences.
pub fn enumerate_faces(p: &HPolytope) -> Result<FaceLattice, GeometryError> {
    let n = p.dim();
    let m = p.facet_count();
    if n > MAX_DIM {
        return Err(GeometryError::UnsupportedScale(format!(
            "dimension {n} exceeds {MAX_DIM}"
        )));
    }
    if m > MAX_FACETS {
        return Err(GeometryError::UnsupportedScale(format!(
            "{m} facets exceeds {MAX_FACETS}"
        )));
    }
    let tol = p.abs_tolerance();
    let coords = enumerate_vertices(n, p.halfspaces(), p.scale(), tol)?;

    // active sets, rejecting slacks in the ambiguous band
    let mut vertex_active: Vec<Vec<usize>> = Vec::with_capacity(coords.len());
    for (vi, v) in coords.iter().enumerate() {
        let mut act = Vec::new();
        for (i, h) in p.halfspaces().iter().enumerate() {
            let s = h.slack(v);
            if s < -AMBIGUITY_BAND * tol {
                return Err(GeometryError::ToleranceConflict(format!(
                    "vertex {vi} violates facet {i} by {}",
                    -s
                )));
            }
            if s.abs() <= tol {
                act.push(i);
            } else if s <= AMBIGUITY_BAND * tol {
                return Err(GeometryError::ToleranceConflict(format!(
                    "vertex {vi} has slack {s:e} against facet {i}"
                )));
            }
        }
        if act.len() < n {
            return Err(GeometryError::ToleranceConflict(format!(
                "vertex {vi} lies on only {} facets",
                act.len()
            )));
        }
        vertex_active.push(act);
    }
    // merge numerically coincident vertices produced by degenerate pivots
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut verts = Vec::new();
    let mut acts = Vec::new();
    for (v, a) in coords.into_iter().zip(vertex_active) {
        if seen.insert(a.clone(), verts.len()).is_none() {
            verts.push(v);
            acts.push(a);
        }
    }

    let mut facet_vertices: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (vi, a) in acts.iter().enumerate() {
        for &i in a {
            facet_vertices[i].push(vi);
        }
    }

    let mut faces: Vec<Face> = Vec::new();
    let mut key: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut children: Vec<Vec<usize>> = Vec::new();

    let active_of = |vs: &[usize]| -> Vec<usize> {
        let mut a = acts[vs[0]].clone();
        for v in &vs[1..] {
            a.retain(|i| acts[*v].contains(i));
        }
        a
    };

    let mut facet_face = vec![0; m];
    for i in 0..m {
        let vs = facet_vertices[i].clone();
        if vs.is_empty() {
            return Err(GeometryError::ToleranceConflict(format!("facet {i} has no vertices")));
        }
        let id = faces.len();
        key.insert(vs.clone(), id);
        faces.push(Face { dim: n - 1, active: vec![i], vertices: vs, witness: Vec::new() });
        by_dim[n - 1].push(id);
        children.push(Vec::new());
        facet_face[i] = id;
    }

    for d in (1..n).rev() {
        let level = by_dim[d].clone();
        for f in level {
            let fv = faces[f].vertices.clone();
            let fa = faces[f].active.clone();
            // candidate facets sharing a vertex with this face
            let mut cand: BTreeSet<usize> = BTreeSet::new();
            for v in &fv {
                cand.extend(acts[*v].iter().copied());
            }
            let mut inter: Vec<Vec<usize>> = cand
                .into_iter()
                .filter(|j| !fa.contains(j))
                .map(|j| fv.iter().copied().filter(|v| acts[*v].contains(&j)).collect::<Vec<_>>())
                .filter(|s: &Vec<usize>| !s.is_empty() && s.len() < fv.len())
                .collect();
            inter.sort();
            inter.dedup();
            let maximal: Vec<Vec<usize>> = inter
                .iter()
                .filter(|s| {
                    !inter
                        .iter()
                        .any(|t| t.len() > s.len() && s.iter().all(|x| t.contains(x)))
                })
                .cloned()
                .collect();
            for s in maximal {
                let id = match key.get(&s) {
                    Some(&id) => {
                        if faces[id].dim != d - 1 {
                            return Err(GeometryError::ToleranceConflict(format!(
                                "face with vertices {s:?} reached at dimensions {} and {}",
                                faces[id].dim,
                                d - 1
                            )));
                        }
                        id
                    }
                    None => {
                        let id = faces.len();
                        let active = active_of(&s);
                        key.insert(s.clone(), id);
                        faces.push(Face { dim: d - 1, active, vertices: s, witness: Vec::new() });
                        by_dim[d - 1].push(id);
                        children.push(Vec::new());
                        id
                    }
                };
                children[f].push(id);
            }
        }
    }

    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); faces.len()];
    for (f, ch) in children.iter_mut().enumerate() {
        ch.sort_unstable();
        for &c in ch.iter() {
            parents[c].push(f);
        }
    }
    for p in parents.iter_mut() {
        p.sort_unstable();
    }

    let mut vertex_face = vec![usize::MAX; verts.len()];
    for &f in &by_dim[0] {
        if faces[f].vertices.len() != 1 {
            return Err(GeometryError::ToleranceConflict(format!(
                "0-face {f} has {} vertices",
                faces[f].vertices.len()
            )));
        }
        vertex_face[faces[f].vertices[0]] = f;
    }
    if vertex_face.iter().any(|f| *f == usize::MAX) {
        return Err(GeometryError::ToleranceConflict("vertex without a 0-face".into()));
    }
    if n >= 2 {
        for &f in &by_dim[n - 2] {
            if faces[f].active.len() != 2 || parents[f].len() != 2 {
                return Err(GeometryError::ToleranceConflict(format!(
                    "(n-2)-face {f} lies on {} facets",
                    faces[f].active.len()
                )));
            }
        }
    }

    for f in 0..faces.len() {
        let pts: Vec<&[f64]> = faces[f].vertices.iter().map(|v| verts[*v].as_slice()).collect();
        if affine_rank(&pts, 1e-9) != faces[f].dim {
            return Err(GeometryError::ToleranceConflict(format!(
                "face {f} spans dimension {} but sits at level {}",
                affine_rank(&pts, 1e-9),
                faces[f].dim
            )));
        }
        let w = centroid(&pts);
        for (i, h) in p.halfspaces().iter().enumerate() {
            let s = h.slack(&w);
            let is_active = faces[f].active.contains(&i);
            if (is_active && s.abs() > tol) || (!is_active && s <= tol) {
                return Err(GeometryError::ToleranceConflict(format!(
                    "witness of face {f} has slack {s:e} against facet {i}"
                )));
            }
        }
        faces[f].witness = w;
    }

    Ok(FaceLattice {
        dim: n,
        vertex_coords: verts,
        faces,
        by_dim,
        children,
        parents,
        facet_face,
        vertex_face,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;

    #[test]
    fn cube_f_vector() {
        let l = enumerate_faces(&shapes::cube(3)).unwrap();
        assert_eq!(l.f_vector(), vec![8, 12, 6]);
        assert_eq!(l.flags().len(), 48);
    }

    #[test]
    fn simplex_f_vector() {
        let l = enumerate_faces(&shapes::regular_simplex(3)).unwrap();
        assert_eq!(l.f_vector(), vec![4, 6, 4]);
    }

    #[test]
    fn four_cube_and_five_simplex() {
        assert_eq!(enumerate_faces(&shapes::cube(4)).unwrap().f_vector(), vec![16, 32, 24, 8]);
        assert_eq!(
            enumerate_faces(&shapes::regular_simplex(5)).unwrap().f_vector(),
            vec![6, 15, 20, 15, 6]
        );
    }

    #[test]
    fn non_simple_octahedron() {
        let l = enumerate_faces(&shapes::cross_polytope(3)).unwrap();
        assert_eq!(l.f_vector(), vec![6, 12, 8]);
        assert!(l.by_dim[0].iter().all(|&v| l.faces[v].active.len() == 4));
    }

    #[test]
    fn dodecahedron_and_pyramid() {
        assert_eq!(enumerate_faces(&shapes::dodecahedron()).unwrap().f_vector(), vec![20, 30, 12]);
        assert_eq!(enumerate_faces(&shapes::square_pyramid(1.0)).unwrap().f_vector(), vec![5, 8, 5]);
    }

    #[test]
    fn witnesses_are_interior_to_their_faces() {
        let p = shapes::cube(3);
        let l = enumerate_faces(&p).unwrap();
        for f in &l.faces {
            for (i, h) in p.halfspaces().iter().enumerate() {
                let s = h.slack(&f.witness);
                if f.active.contains(&i) {
                    assert!(s.abs() < 1e-12);
                } else {
                    assert!(s > 1e-3);
                }
            }
        }
    }

    #[test]
    fn tight_tolerance_conflict_reported() {
        // a facet whose slack at a vertex falls inside the ambiguity band
        let raw = vec![
            (vec![1.0, 0.0], 1.0),
            (vec![-1.0, 0.0], 1.0),
            (vec![0.0, 1.0], 1.0),
            (vec![0.0, -1.0], 1.0),
            (vec![1.0, 1.0], 2.0 - 1e-8),
        ];
        let p = HPolytope::normalize(raw, 1e-9);
        // either the sliver facet is dropped as redundant or enumeration refuses to guess
        if let Ok(p) = p {
            if p.facet_count() == 5 {
                assert!(matches!(enumerate_faces(&p), Err(GeometryError::ToleranceConflict(_))));
            }
        }
    }
}
