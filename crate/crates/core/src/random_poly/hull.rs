//! Incremental convex hull of points in convex position in R³.
//!
//! Every point of a sample of the sphere is a hull vertex, so each insertion
//! finds a visible face by walking from the last new face towards the point
//! as seen from an interior centre, with exact orientation tests.

use robust::{orient3d, Coord3D};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum HullFailure {
    /// four points coplanar in a way the insertion cannot resolve
    Coplanar,
    /// a point is not outside the hull built so far
    Interior(usize),
}

fn c(p: [f64; 3]) -> Coord3D<f64> {
    Coord3D { x: p[0], y: p[1], z: p[2] }
}

/// Positive when `d` is on the inner side of the outward face `(a, b, c)`.
fn orient(a: [f64; 3], b: [f64; 3], cc: [f64; 3], d: [f64; 3]) -> f64 {
    orient3d(c(a), c(b), c(cc), c(d))
}

struct Builder<'a> {
    pts: &'a [[f64; 3]],
    centre: [f64; 3],
    faces: Vec<[usize; 3]>,
    /// `nbr[f][k]` is across the edge `(v[k], v[k+1])`
    nbr: Vec<[usize; 3]>,
    alive: Vec<bool>,
}

impl Builder<'_> {
    fn outside(&self, f: usize, p: usize) -> f64 {
        let [a, b, cc] = self.faces[f];
        -orient(self.pts[a], self.pts[b], self.pts[cc], self.pts[p])
    }

    /// Edge of `f` that the ray from the centre to `p` leaves through, if any.
    fn exit_edge(&self, f: usize, p: usize) -> Option<usize> {
        let v = self.faces[f];
        (0..3).find(|&k| {
            let (a, b, opp) = (self.pts[v[k]], self.pts[v[(k + 1) % 3]], self.pts[v[(k + 2) % 3]]);
            let side = orient(a, b, self.centre, opp);
            let pside = orient(a, b, self.centre, self.pts[p]);
            side * pside < 0.0
        })
    }

    fn locate(&self, start: usize, p: usize) -> Option<usize> {
        let mut f = start;
        for _ in 0..4 * self.faces.len() + 16 {
            match self.exit_edge(f, p) {
                Some(k) => f = self.nbr[f][k],
                None => return (self.outside(f, p) > 0.0).then_some(f),
            }
        }
        None
    }

    fn insert(&mut self, p: usize, hint: usize) -> Result<usize, HullFailure> {
        let start = match self.locate(hint, p) {
            Some(f) => f,
            None => (0..self.faces.len())
                .find(|&f| self.alive[f] && self.outside(f, p) > 0.0)
                .ok_or(HullFailure::Interior(p))?,
        };
        let mut visible = vec![start];
        let mut mark = std::collections::HashSet::from([start]);
        let mut i = 0;
        while i < visible.len() {
            let f = visible[i];
            i += 1;
            for k in 0..3 {
                let g = self.nbr[f][k];
                if mark.contains(&g) {
                    continue;
                }
                // a face coplanar with a point on the sphere cannot contain it,
                // so it is replaced as if visible
                if self.outside(g, p) >= 0.0 {
                    mark.insert(g);
                    visible.push(g);
                }
            }
        }
        let mut by_start = std::collections::HashMap::new();
        let mut by_end = std::collections::HashMap::new();
        let mut created = Vec::new();
        for &f in &visible {
            self.alive[f] = false;
            for k in 0..3 {
                let g = self.nbr[f][k];
                if mark.contains(&g) {
                    continue;
                }
                let (a, b) = (self.faces[f][k], self.faces[f][(k + 1) % 3]);
                let id = self.faces.len();
                self.faces.push([a, b, p]);
                self.nbr.push([g, usize::MAX, usize::MAX]);
                self.alive.push(true);
                let back = self.nbr[g].iter().position(|x| *x == f).expect("adjacency is symmetric");
                self.nbr[g][back] = id;
                by_start.insert(a, id);
                by_end.insert(b, id);
                created.push(id);
            }
        }
        for &id in &created {
            let [a, b, _] = self.faces[id];
            self.nbr[id][1] = by_start[&b];
            self.nbr[id][2] = by_end[&a];
        }
        Ok(*created.last().expect("a visible region has a horizon"))
    }
}

/// Outward triangles of the hull. All points must be extreme.
pub(crate) fn convex_position_hull(pts: &[[f64; 3]]) -> Result<Vec<[usize; 3]>, HullFailure> {
    let n = pts.len();
    if n < 4 {
        return Err(HullFailure::Coplanar);
    }
    let (a, b) = (0, 1);
    let cross = |i: usize| {
        let (u, v) = (sub3(pts[b], pts[a]), sub3(pts[i], pts[a]));
        let w = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        w.iter().any(|x| *x != 0.0)
    };
    let cc = (2..n).find(|&i| cross(i)).ok_or(HullFailure::Coplanar)?;
    let d = (2..n)
        .find(|&i| i != cc && orient(pts[a], pts[b], pts[cc], pts[i]) != 0.0)
        .ok_or(HullFailure::Coplanar)?;
    let centre = [0, 1, 2].map(|k| (pts[a][k] + pts[b][k] + pts[cc][k] + pts[d][k]) / 4.0);
    // orient the base so the apex is inside
    let (b, cc) = if orient(pts[a], pts[b], pts[cc], pts[d]) > 0.0 { (b, cc) } else { (cc, b) };
    let faces = vec![[a, b, cc], [a, d, b], [b, d, cc], [cc, d, a]];
    let mut builder = Builder {
        pts,
        centre,
        nbr: vec![[0; 3]; 4],
        alive: vec![true; 4],
        faces,
    };
    for f in 0..4 {
        for k in 0..3 {
            let (x, y) = (builder.faces[f][k], builder.faces[f][(k + 1) % 3]);
            builder.nbr[f][k] = (0..4)
                .find(|&g| g != f && (0..3).any(|j| builder.faces[g][j] == y && builder.faces[g][(j + 1) % 3] == x))
                .expect("tetrahedron faces pair up");
        }
    }
    let mut hint = 0;
    for p in 0..n {
        if [a, b, cc, d].contains(&p) {
            continue;
        }
        hint = builder.insert(p, hint)?;
    }
    for f in (0..builder.faces.len()).filter(|f| builder.alive[*f]) {
        for k in 0..3 {
            let g = builder.nbr[f][k];
            let apex = builder.faces[g].iter().find(|v| !builder.faces[f].contains(v)).expect("distinct faces");
            if builder.outside(f, *apex) == 0.0 {
                return Err(HullFailure::Coplanar);
            }
        }
    }
    Ok((0..builder.faces.len()).filter(|f| builder.alive[*f]).map(|f| builder.faces[f]).collect())
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
