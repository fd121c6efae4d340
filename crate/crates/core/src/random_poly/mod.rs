//! Random tangent polytopes: the polytope cut out by the tangent planes of the
//! unit sphere at random points, and Monte Carlo statistics of its distances.
//!
//! By polar duality two facets are adjacent exactly when their tangency
//! points span an edge of the convex hull of the sample.

mod hull;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dual_graph::{graph_from_normals, EdgeGraph, GraphError, Weight};
use crate::geometry::{enumerate_faces, shapes, GeometryError};
use crate::linalg::{arc, dot, normalized};

pub const GENERATOR: &str = "chacha8-normal";
const RETRY_BUDGET: u32 = 8;
const JITTER: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum RandomError {
    #[error("TooFewPoints: {count} points cannot span a polytope in R^{n}")]
    TooFewPoints { n: usize, count: usize },
    #[error("DegenerateHull: hull still degenerate after {0} perturbations")]
    DegenerateHull(u32),
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereSample {
    pub n: usize,
    pub points: Vec<Vec<f64>>,
    pub seed: u64,
    pub stream: u64,
    pub generator: String,
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if dot(&v, &v) > 1e-24 {
            return normalized(&v);
        }
    }
}

/// Independent uniform points on `S^{n-1}`, reproducible from `(seed, stream)`.
pub fn sample_sphere_stream(n: usize, count: usize, seed: u64, stream: u64) -> Result<SphereSample, RandomError> {
    if n < 2 || count < n + 1 {
        return Err(RandomError::TooFewPoints { n, count });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let points = (0..count).map(|_| unit_vector(&mut rng, n)).collect();
    Ok(SphereSample { n, points, seed, stream, generator: GENERATOR.into() })
}

pub fn sample_sphere(n: usize, count: usize, seed: u64) -> Result<SphereSample, RandomError> {
    sample_sphere_stream(n, count, seed, 0)
}

fn hull_pairs(points: &[Vec<f64>]) -> Result<Vec<(usize, usize)>, RandomError> {
    let n = points[0].len();
    if n == 3 {
        let pts: Vec<[f64; 3]> = points.iter().map(|p| [p[0], p[1], p[2]]).collect();
        let faces = hull::convex_position_hull(&pts).map_err(|_| RandomError::DegenerateHull(0))?;
        return Ok(faces.iter().flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])]).collect());
    }
    let p = shapes::tangent_polytope(points)?;
    if p.facet_count() != points.len() {
        return Err(RandomError::DegenerateHull(0));
    }
    // normalisation may reorder the facets
    let owner: Vec<usize> = (0..p.facet_count())
        .map(|f| {
            (0..points.len())
                .max_by(|a, b| dot(&points[*a], p.normal(f)).total_cmp(&dot(&points[*b], p.normal(f))))
                .expect("nonempty sample")
        })
        .collect();
    let lattice = enumerate_faces(&p)?;
    Ok(lattice.ridges().into_iter().map(|(i, j, _)| (owner[i], owner[j])).collect())
}

/// Facet adjacency graph of the tangent polytope of `sample`, one vertex per
/// sample point, with angular weights `arccos(σ_i·σ_j)`.
///
/// Degenerate hulls are retried with the points jittered by `1e-9`.
pub fn tangent_polytope_graph(sample: &SphereSample) -> Result<EdgeGraph, RandomError> {
    let mut points = sample.points.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(sample.seed ^ 0x9e37_79b9_7f4a_7c15);
    rng.set_stream(sample.stream);
    for attempt in 0..=RETRY_BUDGET {
        match hull_pairs(&points) {
            Ok(pairs) => return Ok(graph_from_normals(points, pairs)),
            Err(RandomError::DegenerateHull(_)) if attempt < RETRY_BUDGET => {
                for p in &mut points {
                    let noise = unit_vector(&mut rng, sample.n);
                    *p = normalized(&crate::linalg::axpy(p, JITTER, &noise));
                }
            }
            Err(RandomError::DegenerateHull(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Err(RandomError::DegenerateHull(RETRY_BUDGET))
}

/// Index of the point maximising `σ_i·s`, lowest index on ties.
pub fn assign_facet(points: &[Vec<f64>], s: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..points.len() {
        if dot(&points[i], s) > dot(&points[best], s) {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryMode {
    /// the pair `(e_n, -e_n)` once per trial
    Antipodal,
    /// `queries` independent uniform pairs per trial
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    /// linear sizes; a trial at size `N` samples `N^{n-1}` points
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub queries: usize,
    pub mode: QueryMode,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), RandomError> {
        let bad = |m: &str| Err(RandomError::InvalidConfig(m.into()));
        if self.n < 3 {
            return bad("n must be at least 3");
        }
        if self.sizes.is_empty() || self.sizes.iter().any(|s| *s < 2) {
            return bad("sizes must be nonempty and at least 2");
        }
        if self.trials == 0 {
            return bad("trials must be positive");
        }
        if self.mode == QueryMode::Random && self.queries == 0 {
            return bad("random mode needs at least one query per trial");
        }
        Ok(())
    }

    pub fn points(&self, size: usize) -> usize {
        size.pow(self.n as u32 - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub size: usize,
    pub points: usize,
    pub trial: usize,
    pub seed: u64,
    pub stream: u64,
    pub query: usize,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
    pub facet1: usize,
    pub facet2: usize,
    pub dist_comb: f64,
    pub dist_ang: f64,
    pub sphere_dist: f64,
    /// `dist_comb / (N · sphere_dist)`
    pub comb_ratio: f64,
    /// `dist_ang / sphere_dist`
    pub ang_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    /// `std / mean`
    pub cv: f64,
    /// half-width of the normal 95% interval for the mean
    pub ci95: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        let count = xs.len();
        let mean = xs.iter().sum::<f64>() / count as f64;
        let var = if count > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64
        } else {
            0.0
        };
        let std = var.sqrt();
        Summary {
            count,
            mean,
            std,
            cv: std / mean,
            ci95: 1.96 * std / (count as f64).sqrt(),
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
            max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeAggregate {
    pub size: usize,
    pub points: usize,
    pub comb: Summary,
    pub ang: Summary,
    /// smallest `c` with every comb ratio `<= c`
    pub band_upper: f64,
    /// largest `c′` with every comb ratio `>= c′ / ln N`
    pub band_lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub records: Vec<QueryRecord>,
    pub aggregates: Vec<SizeAggregate>,
}

fn trial(config: &ExperimentConfig, size: usize, t: usize) -> Result<Vec<QueryRecord>, RandomError> {
    let stream = ((size as u64) << 32) | t as u64;
    let sample = sample_sphere_stream(config.n, config.points(size), config.seed, stream)?;
    let graph = tangent_polytope_graph(&sample)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
    rng.set_stream(stream);
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = match config.mode {
        QueryMode::Antipodal => {
            let mut north = vec![0.0; config.n];
            north[config.n - 1] = 1.0;
            let south = north.iter().map(|x| -x).collect();
            vec![(north, south)]
        }
        QueryMode::Random => (0..config.queries)
            .map(|_| (unit_vector(&mut rng, config.n), unit_vector(&mut rng, config.n)))
            .collect(),
    };
    let mut out = Vec::with_capacity(pairs.len());
    for (q, (s1, s2)) in pairs.into_iter().enumerate() {
        let (f1, f2) = (assign_facet(&sample.points, &s1), assign_facet(&sample.points, &s2));
        let dist_comb = graph.distance(&[f1], &[f2], Weight::Comb)?;
        let dist_ang = graph.distance(&[f1], &[f2], Weight::Angular)?;
        let sphere_dist = arc(&s1, &s2);
        out.push(QueryRecord {
            size,
            points: sample.points.len(),
            trial: t,
            seed: config.seed,
            stream,
            query: q,
            s1,
            s2,
            facet1: f1,
            facet2: f2,
            dist_comb,
            dist_ang,
            sphere_dist,
            comb_ratio: if sphere_dist > 0.0 { dist_comb / (size as f64 * sphere_dist) } else { 0.0 },
            ang_ratio: if sphere_dist > 0.0 { dist_ang / sphere_dist } else { 0.0 },
        });
    }
    Ok(out)
}

/// Runs every trial in parallel. Each trial draws from its own ChaCha stream,
/// so results do not depend on the number of workers.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, RandomError> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = config.sizes.iter().flat_map(|s| (0..config.trials).map(move |t| (*s, t))).collect();
    let records: Vec<QueryRecord> = jobs
        .par_iter()
        .map(|&(size, t)| trial(config, size, t))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let aggregates = config
        .sizes
        .iter()
        .map(|&size| {
            let rs: Vec<&QueryRecord> = records.iter().filter(|r| r.size == size && r.sphere_dist > 0.0).collect();
            let comb: Vec<f64> = rs.iter().map(|r| r.comb_ratio).collect();
            let ang: Vec<f64> = rs.iter().map(|r| r.ang_ratio).collect();
            let log_n = (size as f64).ln();
            SizeAggregate {
                size,
                points: config.points(size),
                band_upper: comb.iter().copied().fold(0.0, f64::max),
                band_lower: comb.iter().copied().fold(f64::INFINITY, f64::min) * log_n,
                comb: Summary::of(&comb),
                ang: Summary::of(&ang),
            }
        })
        .collect();
    Ok(ExperimentResult { config: config.clone(), records, aggregates })
}

impl ExperimentResult {
    /// Largest relative deviation of each band constant from its mean over
    /// sizes, as `(upper, lower)`.
    pub fn band_deviation(&self) -> (f64, f64) {
        let dev = |xs: Vec<f64>| {
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - mean).abs() / mean).fold(0.0, f64::max)
        };
        (
            dev(self.aggregates.iter().map(|a| a.band_upper).collect()),
            dev(self.aggregates.iter().map(|a| a.band_lower).collect()),
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "size,points,trial,seed,stream,query,facet1,facet2,dist_comb,dist_ang,sphere_dist,comb_ratio,ang_ratio\n",
        );
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.size,
                r.points,
                r.trial,
                r.seed,
                r.stream,
                r.query,
                r.facet1,
                r.facet2,
                r.dist_comb,
                r.dist_ang,
                r.sphere_dist,
                r.comb_ratio,
                r.ang_ratio
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sampling_is_reproducible_and_centred() {
        assert_eq!(sample_sphere(3, 100, 42).unwrap(), sample_sphere(3, 100, 42).unwrap());
        let s = sample_sphere(3, 100_000, 7).unwrap();
        for k in 0..3 {
            let mean = s.points.iter().map(|p| p[k]).sum::<f64>() / 1e5;
            assert!(mean.abs() < 0.02);
        }
        assert!(s.points.iter().all(|p| (dot(p, p).sqrt() - 1.0).abs() < 1e-12));
        assert_eq!(sample_sphere(3, 2, 0), Err(RandomError::TooFewPoints { n: 3, count: 2 }));
    }

    fn sample_of(points: Vec<Vec<f64>>) -> SphereSample {
        SphereSample { n: points[0].len(), points, seed: 0, stream: 0, generator: GENERATOR.into() }
    }

    #[test]
    fn tetrahedron_gives_k4() {
        let g = tangent_polytope_graph(&sample_of(shapes::regular_simplex_normals(3))).unwrap();
        assert_eq!(g.edges().len(), 6);
    }

    #[test]
    fn octahedron_directions() {
        let mut pts = Vec::new();
        for k in 0..3 {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; 3];
                v[k] = s;
                pts.push(v);
            }
        }
        let g = tangent_polytope_graph(&sample_of(pts)).unwrap();
        assert_eq!(g.edges().len(), 12);
        assert!(g.edges().iter().all(|e| (e.w_ang.unwrap() - PI / 2.0).abs() < 1e-12));
    }

    #[test]
    fn random_hull_is_a_triangulation() {
        let s = sample_sphere(3, 500, 3).unwrap();
        let g = tangent_polytope_graph(&s).unwrap();
        assert_eq!(g.vertex_count(), 500);
        assert_eq!(g.edges().len(), 3 * 500 - 6);
        assert!(g.diameter(Weight::Comb).unwrap().is_finite());
    }

    #[test]
    fn four_dimensional_path_matches_hull_adjacency() {
        let s = sample_sphere(4, 20, 5).unwrap();
        let g = tangent_polytope_graph(&s).unwrap();
        assert_eq!(g.vertex_count(), 20);
        // simplicial 3-sphere: every vertex has degree at least 4
        assert!((0..20).all(|v| g.neighbours(v).count() >= 4));
    }

    #[test]
    fn assignment_prefers_lowest_index() {
        let pts = vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]];
        assert_eq!(assign_facet(&pts, &[1.0, 0.0, 0.0]), 1);
    }

    #[test]
    fn experiment_is_deterministic() {
        let config = ExperimentConfig { n: 3, sizes: vec![5, 8], trials: 4, queries: 3, mode: QueryMode::Random, seed: 11 };
        let a = run_experiment(&config).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_experiment(&config).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.records.len(), 2 * 4 * 3);
        for r in &a.records {
            assert!(r.comb_ratio >= 0.0);
            assert!(r.dist_ang >= arc(&s_normal(&a, r, r.facet1), &s_normal(&a, r, r.facet2)) - 1e-9);
        }
    }

    fn s_normal(res: &ExperimentResult, r: &QueryRecord, f: usize) -> Vec<f64> {
        sample_sphere_stream(res.config.n, r.points, r.seed, r.stream).unwrap().points[f].clone()
    }
}
