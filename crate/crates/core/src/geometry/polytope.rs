use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::linalg::{dot, norm};
use crate::lp::{LinearProgram, LpOutcome, Relation};

/// Default threshold for geometric equality predicates.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// LP-decided slacks are never trusted below this, whatever the configured tolerance.
const LP_FLOOR: f64 = 1e-7;

/// The halfspace `{x : normal·x ≤ offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.offset - dot(&self.normal, x)
    }
}

/// A compact, full-dimensional convex polytope given by irredundant halfspaces.
///
/// Halfspace indices are the facet ids used throughout the crate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HPolytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    tolerance: f64,
}

#[derive(Deserialize)]
struct RawPolytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    tolerance: Option<f64>,
}

impl<'de> Deserialize<'de> for HPolytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawPolytope::deserialize(d)?;
        let tol = raw.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        if raw.halfspaces.iter().any(|h| h.normal.len() != raw.dim) {
            return Err(serde::de::Error::custom("normal length differs from dim"));
        }
        let pairs = raw
            .halfspaces
            .into_iter()
            .map(|h| (h.normal, h.offset))
            .collect();
        HPolytope::normalize(pairs, tol).map_err(serde::de::Error::custom)
    }
}

impl HPolytope {
    /// Validates raw `(normal, offset)` pairs into an irredundant polytope.
    ///
    /// Normals are scaled to unit length, duplicated constraints merged and
    /// redundant ones removed with one LP per halfspace.
    pub fn normalize(raw: Vec<(Vec<f64>, f64)>, tolerance: f64) -> Result<Self, GeometryError> {
        let dim = raw.first().map(|r| r.0.len()).unwrap_or(0);
        if dim < 2 {
            return Err(GeometryError::DimensionMismatch { expected: 2, found: dim });
        }
        if let Some((v, _)) = raw.iter().find(|(v, _)| v.len() != dim) {
            return Err(GeometryError::DimensionMismatch { expected: dim, found: v.len() });
        }
        if raw.len() < dim + 1 {
            return Err(GeometryError::TooFewHalfspaces { dim, found: raw.len() });
        }
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(GeometryError::InvalidTolerance(tolerance));
        }

        let mut hs: Vec<Halfspace> = Vec::with_capacity(raw.len());
        for (idx, (v, b)) in raw.into_iter().enumerate() {
            let l = norm(&v);
            if !(l > 0.0 && l.is_finite() && b.is_finite()) {
                return Err(GeometryError::InvalidHalfspace(idx));
            }
            let (normal, offset) = if (l - 1.0).abs() <= 4.0 * f64::EPSILON {
                (v, b)
            } else {
                (v.iter().map(|x| x / l).collect(), b / l)
            };
            match hs
                .iter_mut()
                .find(|h| h.normal.iter().zip(&normal).all(|(a, c)| (a - c).abs() <= tolerance))
            {
                Some(h) => h.offset = h.offset.min(offset),
                None => hs.push(Halfspace { normal, offset }),
            }
        }

        let mut p = HPolytope { dim, halfspaces: hs, tolerance };
        let lp_tol = p.lp_tolerance();

        // non-empty and full-dimensional
        match p.chebyshev(&[]) {
            None => return Err(GeometryError::Empty),
            Some((_, r)) if r < -lp_tol => return Err(GeometryError::Empty),
            Some((_, r)) if r <= lp_tol => return Err(GeometryError::Degenerate),
            _ => {}
        }
        // bounded: finite support in every coordinate direction
        for j in 0..dim {
            for s in [1.0, -1.0] {
                let mut c = vec![0.0; dim];
                c[j] = s;
                if p.support(&c).is_none() {
                    return Err(GeometryError::Unbounded);
                }
            }
        }
        // irredundant: each hyperplane must carry an (n-1)-dimensional face
        let mut i = 0;
        while i < p.halfspaces.len() {
            match p.chebyshev(&[i]) {
                Some((_, r)) if r > lp_tol => i += 1,
                _ => {
                    p.halfspaces.remove(i);
                }
            }
        }
        if p.halfspaces.len() < dim + 1 {
            return Err(GeometryError::Degenerate);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn facet_count(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn normal(&self, facet: usize) -> &[f64] {
        &self.halfspaces[facet].normal
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Same halfspaces with another predicate threshold.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Length scale that absolute predicates are measured against.
    pub fn scale(&self) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.offset.abs())
            .fold(1.0, f64::max)
    }

    /// Absolute threshold for predicates evaluated on computed coordinates.
    pub fn abs_tolerance(&self) -> f64 {
        self.tolerance * self.scale()
    }

    /// Absolute threshold for slacks returned by the LP solver.
    pub fn lp_tolerance(&self) -> f64 {
        self.tolerance.max(LP_FLOOR) * self.scale()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let t = self.abs_tolerance();
        self.halfspaces.iter().all(|h| h.slack(x) >= -t)
    }

    /// `max c·x` over the polytope, `None` when unbounded or empty.
    pub fn support(&self, c: &[f64]) -> Option<(f64, Vec<f64>)> {
        let mut lp = LinearProgram::maximize(c.to_vec());
        for h in &self.halfspaces {
            lp.row(h.normal.clone(), Relation::Le, h.offset);
        }
        match lp.solve() {
            LpOutcome::Optimal { value, x } => Some((value, x)),
            _ => None,
        }
    }

    /// Largest ball centred in `{x ∈ P : normal_e·x = offset_e, e ∈ equalities}`.
    ///
    /// Returns the centre and the radius (capped at the polytope scale, and
    /// negative when the inequalities are inconsistent), or `None` when the
    /// equalities themselves cannot be met.
    pub fn chebyshev(&self, equalities: &[usize]) -> Option<(Vec<f64>, f64)> {
        let n = self.dim;
        let cap = self.scale();
        let mut obj = vec![0.0; n + 1];
        obj[n] = 1.0;
        let mut lp = LinearProgram::maximize(obj);
        lp.bound(n, f64::NEG_INFINITY, cap);
        for (i, h) in self.halfspaces.iter().enumerate() {
            let mut row = h.normal.clone();
            if equalities.contains(&i) {
                row.push(0.0);
                lp.row(row, Relation::Eq, h.offset);
            } else {
                row.push(1.0);
                lp.row(row, Relation::Le, h.offset);
            }
        }
        match lp.solve() {
            LpOutcome::Optimal { mut x, .. } => {
                let r = x.pop().unwrap();
                Some((x, r))
            }
            _ => None,
        }
    }

    /// Image under `x ↦ s·R x + t` for orthogonal `R` (rows) and `s > 0`.
    pub fn transformed(&self, rotation: &[Vec<f64>], s: f64, t: &[f64]) -> Result<Self, GeometryError> {
        let raw = self
            .halfspaces
            .iter()
            .map(|h| {
                let u: Vec<f64> = rotation.iter().map(|row| dot(row, &h.normal)).collect();
                let b = s * h.offset + dot(&u, t);
                (u, b)
            })
            .collect();
        HPolytope::normalize(raw, self.tolerance)
    }
}
