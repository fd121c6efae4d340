//! Skyscrapers: intersections of cones of decreasing heights over an
//! increasing nested family of scaled bases, and their angle asymptotics.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dual_graph::{edge_graph_from_lattice, Weight};
use crate::geometry::{enumerate_faces, shapes, GeometryError, HPolytope};
use crate::linalg::{arc, dot};

#[derive(Debug, Error, PartialEq)]
pub enum SkyscraperError {
    #[error("InvalidSpec: {0}")]
    InvalidSpec(String),
    #[error("SearchExhausted: no scales and heights satisfy the intersection condition")]
    SearchExhausted,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Bases `X_i ⊂ R^k`, scales `λ_i`, heights `h_i` and vertical stretch `C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkyscraperSpec {
    pub bases: Vec<HPolytope>,
    pub scales: Vec<f64>,
    pub heights: Vec<f64>,
    pub stretch: f64,
}

/// Where a facet of a built skyscraper comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FacetOrigin {
    Bottom,
    Side { cone: usize, facet: usize },
}

#[derive(Debug, Clone)]
pub struct Skyscraper {
    pub polytope: HPolytope,
    /// origin of every facet of `polytope`
    pub origins: Vec<FacetOrigin>,
    /// cone facets that did not survive as facets
    pub missing: Vec<(usize, usize)>,
}

impl SkyscraperSpec {
    pub fn cones(&self) -> usize {
        self.bases.len()
    }

    pub fn base_dim(&self) -> usize {
        self.bases[0].dim()
    }

    pub fn with_stretch(&self, stretch: f64) -> Self {
        SkyscraperSpec { stretch, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), SkyscraperError> {
        let bad = |m: String| Err(SkyscraperError::InvalidSpec(m));
        let n = self.bases.len();
        if n == 0 {
            return bad("no bases".into());
        }
        if self.scales.len() != n || self.heights.len() != n {
            return bad(format!(
                "{n} bases but {} scales and {} heights",
                self.scales.len(),
                self.heights.len()
            ));
        }
        if !(self.stretch > 0.0 && self.stretch.is_finite()) {
            return bad(format!("stretch must be positive, got {}", self.stretch));
        }
        let k = self.bases[0].dim();
        for (i, b) in self.bases.iter().enumerate() {
            if b.dim() != k {
                return bad(format!("base {i} has dimension {}, expected {k}", b.dim()));
            }
            if b.halfspaces().iter().any(|h| h.offset <= b.abs_tolerance()) {
                return bad(format!("base {i} does not contain the origin in its interior"));
            }
        }
        for i in 0..n {
            if !(self.scales[i] > 0.0 && self.scales[i].is_finite()) {
                return bad(format!("scale {i} must be positive"));
            }
            if !(self.heights[i] > 0.0 && self.heights[i].is_finite()) {
                return bad(format!("height {i} must be positive"));
            }
            if i > 0 && self.scales[i] <= self.scales[i - 1] {
                return bad(format!("scales must increase: λ_{} ≥ λ_{}", i - 1, i));
            }
            if i > 0 && self.heights[i] >= self.heights[i - 1] {
                return bad(format!("heights must decrease: h_{} ≤ h_{}", i - 1, i));
            }
        }
        for i in 1..n {
            if nesting_ratio(&self.bases[i - 1], &self.bases[i]) * self.scales[i - 1] >= self.scales[i] {
                return bad(format!("λ_{} X_{} is not strictly inside λ_{i} X_{i}", i - 1, i - 1));
            }
        }
        Ok(())
    }
}

/// Smallest `s` with `X ⊂ s·Y`.
fn nesting_ratio(x: &HPolytope, y: &HPolytope) -> f64 {
    y.halfspaces()
        .iter()
        .map(|h| x.support(&h.normal).map_or(f64::INFINITY, |(v, _)| v / h.offset))
        .fold(0.0, f64::max)
}

/// Raw halfspaces: the floor, then each cone facet `a·x + (b / (C h)) z ≤ b`.
fn raw_halfspaces(spec: &SkyscraperSpec) -> (Vec<(Vec<f64>, f64)>, Vec<FacetOrigin>) {
    let k = spec.base_dim();
    let mut floor = vec![0.0; k + 1];
    floor[k] = -1.0;
    let mut raw = vec![(floor, 0.0)];
    let mut origins = vec![FacetOrigin::Bottom];
    for (cone, base) in spec.bases.iter().enumerate() {
        let apex = spec.stretch * spec.heights[cone];
        for (facet, h) in base.halfspaces().iter().enumerate() {
            let b = spec.scales[cone] * h.offset;
            let mut v = h.normal.clone();
            v.push(b / apex);
            raw.push((v, b));
            origins.push(FacetOrigin::Side { cone, facet });
        }
    }
    (raw, origins)
}

pub fn build(spec: &SkyscraperSpec) -> Result<Skyscraper, SkyscraperError> {
    spec.validate()?;
    let (raw, raw_origins) = raw_halfspaces(spec);
    let units: Vec<(Vec<f64>, f64)> = raw
        .iter()
        .map(|(v, b)| {
            let l = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            (v.iter().map(|x| x / l).collect(), b / l)
        })
        .collect();
    let tol = spec.bases[0].tolerance();
    let polytope = HPolytope::normalize(raw, tol)?;
    let mut origins = Vec::with_capacity(polytope.facet_count());
    let mut used = vec![false; units.len()];
    for h in polytope.halfspaces() {
        let best = units
            .iter()
            .enumerate()
            .min_by(|a, b| {
                let da = arc(&a.1 .0, &h.normal) + (a.1 .1 - h.offset).abs();
                let db = arc(&b.1 .0, &h.normal) + (b.1 .1 - h.offset).abs();
                da.total_cmp(&db)
            })
            .map(|(i, _)| i)
            .expect("at least one raw halfspace");
        used[best] = true;
        origins.push(raw_origins[best]);
    }
    let missing = raw_origins
        .iter()
        .zip(&used)
        .filter_map(|(o, u)| match (o, u) {
            (FacetOrigin::Side { cone, facet }, false) => Some((*cone, *facet)),
            _ => None,
        })
        .collect();
    Ok(Skyscraper { polytope, origins, missing })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkyscraperReport {
    /// every cone facet is a facet and side facets meet only within the
    /// same or consecutive cones
    pub intersection_ok: bool,
    pub missing_facets: Vec<(usize, usize)>,
    /// side facet pairs from non-consecutive cones sharing a point
    pub distant_contacts: Vec<(usize, usize)>,
    pub facet_count: usize,
    /// `1 + Σ #facets(X_i)`
    pub expected_facet_count: usize,
    pub facet_count_ok: bool,
    pub min_side_angle: f64,
    pub min_bottom_angle: f64,
    /// smallest acute angle between facet hyperplanes of consecutive bases,
    /// ignoring parallel pairs
    pub min_consecutive_base_angle: f64,
    pub parallel_consecutive_pairs: usize,
    pub comb_diameter: f64,
}

pub fn verify(sky: &Skyscraper, spec: &SkyscraperSpec) -> Result<SkyscraperReport, SkyscraperError> {
    let p = &sky.polytope;
    let lattice = enumerate_faces(p)?;
    let cone_of = |f: usize| match sky.origins[f] {
        FacetOrigin::Side { cone, .. } => Some(cone),
        FacetOrigin::Bottom => None,
    };
    let mut distant = std::collections::BTreeSet::new();
    for &v in &lattice.by_dim[0] {
        let active = &lattice.faces[v].active;
        for (x, &f) in active.iter().enumerate() {
            for &g in &active[x + 1..] {
                if let (Some(a), Some(b)) = (cone_of(f), cone_of(g)) {
                    if a.abs_diff(b) > 1 {
                        distant.insert((f.min(g), f.max(g)));
                    }
                }
            }
        }
    }
    let (mut side, mut bottom) = (f64::INFINITY, f64::INFINITY);
    for (i, j, _) in lattice.ridges() {
        let a = arc(p.normal(i), p.normal(j));
        if cone_of(i).is_none() || cone_of(j).is_none() {
            bottom = bottom.min(a);
        } else {
            side = side.min(a);
        }
    }
    let (mut min_base, mut parallel) = (PI / 2.0, 0);
    for w in spec.bases.windows(2) {
        for h in w[0].halfspaces() {
            for g in w[1].halfspaces() {
                let c = dot(&h.normal, &g.normal).abs().min(1.0);
                if 1.0 - c < 1e-12 {
                    parallel += 1;
                } else {
                    min_base = min_base.min(c.acos());
                }
            }
        }
    }
    let expected = 1 + spec.bases.iter().map(HPolytope::facet_count).sum::<usize>();
    let graph = edge_graph_from_lattice(p, &lattice);
    let distant_contacts: Vec<_> = distant.into_iter().collect();
    Ok(SkyscraperReport {
        intersection_ok: sky.missing.is_empty() && distant_contacts.is_empty(),
        missing_facets: sky.missing.clone(),
        distant_contacts,
        facet_count: p.facet_count(),
        expected_facet_count: expected,
        facet_count_ok: p.facet_count() == expected,
        min_side_angle: side,
        min_bottom_angle: bottom,
        min_consecutive_base_angle: min_base,
        parallel_consecutive_pairs: parallel,
        comb_diameter: graph.diameter(Weight::Comb).expect("comb weights always exist"),
    })
}

/// Searches geometric scale ratios and height profiles for specs meeting
/// the intersection condition and returns the one with the flattest
/// steepest cone, `max λ_i / h_i`, so side angles settle at small stretch.
pub fn auto_scale(bases: &[HPolytope], stretch: f64) -> Result<SkyscraperSpec, SkyscraperError> {
    let n = bases.len();
    if n == 0 {
        return Err(SkyscraperError::InvalidSpec("no bases".into()));
    }
    let min_ratio = bases
        .windows(2)
        .map(|w| nesting_ratio(&w[0], &w[1]))
        .fold(1.0, f64::max);
    let mut candidates = Vec::new();
    for factor in [1.02, 1.05, 1.1, 1.25, 1.5, 2.0, 3.0, 4.0] {
        let ratio = min_ratio * factor;
        let scales: Vec<f64> = (0..n).map(|i| ratio.powi(i as i32)).collect();
        let mut profiles = vec![
            (0..n).map(|i| (n - i) as f64).collect(),
            (0..n).map(|i| 2f64.powi((n - i) as i32 - 1)).collect(),
            (0..n).map(|i| ratio.powi((n - i) as i32 - 1)).collect(),
        ];
        profiles.extend([2.0, 3.0, 4.0, 8.0].map(|q| tapered_heights(n, q * ratio)));
        for heights in profiles {
            candidates.push(SkyscraperSpec { bases: bases.to_vec(), scales: scales.clone(), heights, stretch });
        }
    }
    let steepness = |s: &SkyscraperSpec| s.scales.iter().zip(&s.heights).map(|(l, h)| l / h).fold(0.0, f64::max);
    candidates
        .into_par_iter()
        .filter(|spec| {
            spec.validate().is_ok()
                && build(spec)
                    .ok()
                    .and_then(|sky| verify(&sky, spec).ok())
                    .is_some_and(|r| r.intersection_ok)
        })
        .min_by(|a, b| steepness(a).total_cmp(&steepness(b)))
        .ok_or(SkyscraperError::SearchExhausted)
}

/// Alternating regular triangles `±△` (inradius 1), scaled by `(N+1)^i`
/// with heights `C·(N−i+1)`, `i = 1..N`.
/// Heights ending at 1 whose relative gaps `1 - h_{i+1}/h_i` start at 1/2
/// and shrink by `q` from one cone to the next.
///
/// Cone `i` must be the only one of its kind in a horizontal slice while
/// cone `i + 1` takes over from cone `i - 1`; with scale ratio `ρ` this needs
/// the gaps to shrink by more than `2ρ - 1`.
pub fn tapered_heights(n: usize, q: f64) -> Vec<f64> {
    let mut heights = vec![1.0];
    let mut gap = 0.5 / q.powi(n.saturating_sub(2) as i32);
    for _ in 1..n {
        let h = heights.last().unwrap() / (1.0 - gap);
        heights.push(h);
        gap *= q;
    }
    heights.reverse();
    heights
}

/// Alternating up and down triangles of inradius 1, `cones` of them.
pub fn hexagon_bases(cones: usize) -> Vec<HPolytope> {
    let up = shapes::regular_polygon(3, PI / 2.0);
    let down = shapes::regular_polygon(3, -PI / 2.0);
    (0..cones).map(|i| if i % 2 == 0 { up.clone() } else { down.clone() }).collect()
}

/// Alternating triangles with scales `(n+1)^i` and heights `n-i+1`,
/// `i = 1..=n`. The intersection condition holds for `n <= 2` only; larger
/// `n` swallow middle cones.
pub fn hexagon_spec(n: usize, stretch: f64) -> SkyscraperSpec {
    SkyscraperSpec {
        bases: hexagon_bases(n),
        scales: (1..=n).map(|i| ((n + 1) as f64).powi(i as i32)).collect(),
        heights: (1..=n).map(|i| (n - i + 1) as f64).collect(),
        stretch,
    }
}

/// `2n` alternating triangles with scales and heights from [`auto_scale`].
pub fn hexagon_family(n: usize, stretch: f64) -> Result<SkyscraperSpec, SkyscraperError> {
    auto_scale(&hexagon_bases(2 * n), stretch)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub stretch: f64,
    pub min_side_angle: f64,
    pub min_bottom_angle: f64,
    pub intersection_ok: bool,
    pub facet_count: usize,
    pub comb_diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticStudy {
    pub rows: Vec<StudyRow>,
    pub side_monotone: bool,
    pub bottom_monotone: bool,
    /// limits extrapolated from the last three rows
    pub side_limit: f64,
    pub bottom_limit: f64,
}

/// Aitken's Δ² extrapolation of the last three terms, which needs no
/// assumption on the convergence rate.
fn extrapolate(xs: &[f64]) -> f64 {
    match xs {
        [.., a, b, c] => {
            let denom = c - 2.0 * b + a;
            if denom.abs() < 1e-15 {
                *c
            } else {
                c - (c - b) * (c - b) / denom
            }
        }
        [.., c] => *c,
        [] => f64::NAN,
    }
}

/// Builds and verifies `spec` at every stretch, in parallel.
pub fn asymptotic_study(spec: &SkyscraperSpec, stretches: &[f64]) -> Result<AsymptoticStudy, SkyscraperError> {
    let rows = stretches
        .par_iter()
        .map(|&c| {
            let s = spec.with_stretch(c);
            let sky = build(&s)?;
            let r = verify(&sky, &s)?;
            Ok(StudyRow {
                stretch: c,
                min_side_angle: r.min_side_angle,
                min_bottom_angle: r.min_bottom_angle,
                intersection_ok: r.intersection_ok,
                facet_count: r.facet_count,
                comb_diameter: r.comb_diameter,
            })
        })
        .collect::<Result<Vec<_>, SkyscraperError>>()?;
    let side: Vec<f64> = rows.iter().map(|r| r.min_side_angle).collect();
    let bottom: Vec<f64> = rows.iter().map(|r| r.min_bottom_angle).collect();
    let monotone = |xs: &[f64]| {
        xs.windows(2).all(|w| w[1] >= w[0] - 1e-12) || xs.windows(2).all(|w| w[1] <= w[0] + 1e-12)
    };
    Ok(AsymptoticStudy {
        side_monotone: monotone(&side),
        bottom_monotone: monotone(&bottom),
        side_limit: extrapolate(&side),
        bottom_limit: extrapolate(&bottom),
        rows,
    })
}

impl AsymptoticStudy {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("stretch,min_side_angle,min_bottom_angle,intersection_ok,facet_count,comb_diameter\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.stretch, r.min_side_angle, r.min_bottom_angle, r.intersection_ok, r.facet_count, r.comb_diameter
            ));
        }
        out
    }
}
