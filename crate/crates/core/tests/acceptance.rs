//! Acceptance criteria, one test each. Every test prints a single line
//! `criterion N: PASS|FAIL ...` before asserting.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use polyspread::dual_graph::{build_edge_graph, subdivided_cube_graph, Weight};
use polyspread::geometry::{coangle, enumerate_faces, is_simple, shapes, CoangleMethod, FaceLattice, HPolytope};
use polyspread::linalg::{arc, dot};
use polyspread::random_poly::{run_experiment, sample_sphere, ExperimentConfig, QueryMode};
use polyspread::rounding::{convergence_study, round, VertexSet};
use polyspread::skyscraper::{asymptotic_study, build, hexagon_family, verify};
use polyspread::spread::{
    build_cube_map, certify, search_spread, CubeLabeling, DegreeStatus, MapOptions, SearchMode, SearchOptions,
    SpreadInstance,
};
use polyspread::waists::{generic_map, probe_fibers, ProbeOptions};

fn report(n: usize, checks: &[(&str, bool)], detail: &str, elapsed: Duration, limit: Duration) -> bool {
    let in_time = elapsed < limit;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let ok = failed.is_empty() && in_time;
    let mut line = format!(
        "criterion {n}: {} {detail} ({:.2}s, limit {}s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    if !failed.is_empty() {
        line.push_str(&format!(" failed: {}", failed.join(", ")));
    }
    if !in_time {
        line.push_str(" failed: runtime");
    }
    println!("{line}");
    ok
}

/// Random simple 3-polytopes: tangent polytopes of sphere samples.
fn random_simple_3_polytopes(count: usize, seed: u64) -> Vec<HPolytope> {
    let mut out = Vec::new();
    let mut s = seed;
    while out.len() < count {
        let m = 8 + (s % 17) as usize;
        let sample = sample_sphere(3, m, s).unwrap();
        s += 1;
        let Ok(p) = shapes::tangent_polytope(&sample.points) else { continue };
        if is_simple(&enumerate_faces(&p).unwrap()) {
            out.push(p);
        }
    }
    out
}

#[test]
fn criterion_01_cube_metrics() {
    let t = Instant::now();
    let g = build_edge_graph(&shapes::cube(3)).unwrap();
    // facets 2i and 2i+1 are the opposite faces x_i = ±1
    let mut comb_ok = true;
    let mut ang_err: f64 = 0.0;
    for i in 0..3 {
        comb_ok &= g.distance(&[2 * i], &[2 * i + 1], Weight::Comb).unwrap() == 2.0;
        ang_err = ang_err.max((g.distance(&[2 * i], &[2 * i + 1], Weight::Angular).unwrap() - PI).abs());
    }
    let ok = report(
        1,
        &[("comb = 2", comb_ok), ("angular = π", ang_err < 1e-9)],
        &format!("max |dist_ang - π| = {ang_err:.1e}"),
        t.elapsed(),
        Duration::from_secs(1),
    );
    assert!(ok);
}

#[test]
fn criterion_02_subdivided_cube() {
    let t = Instant::now();
    let mut checks = Vec::new();
    let mut found = Vec::new();
    for n in [2, 5, 10] {
        let (g, sides) = subdivided_cube_graph(n).unwrap();
        let inst = SpreadInstance::from_graph(g);
        let c = certify(&inst, &CubeLabeling::bands(&sides), Weight::Comb, MapOptions::default()).unwrap();
        found.push(format!("N={n}: d={}", c.d));
        checks.push((c.d == (n + 1) as f64, c.is_valid_lower_bound()));
    }
    let exact = checks.iter().all(|c| c.0);
    let valid = checks.iter().all(|c| c.1);
    let ok = report(
        2,
        &[("d = N+1", exact), ("certificate valid", valid)],
        &found.join(", "),
        t.elapsed(),
        Duration::from_secs(5),
    );
    assert!(ok);
}

fn spread_corpus() -> Vec<(String, HPolytope)> {
    let mut out: Vec<(String, HPolytope)> = Vec::new();
    let mut push = |name: String, p: Result<HPolytope, polyspread::geometry::GeometryError>| {
        if let Ok(p) = p {
            out.push((name, p));
        }
    };
    for n in 3..=5 {
        push(format!("cube{n}"), Ok(shapes::cube(n)));
        push(format!("simplex{n}"), Ok(shapes::regular_simplex(n)));
        push(format!("cross{n}"), Ok(shapes::cross_polytope(n)));
        // truncate the cube at a few vertices
        for (j, depth) in [0.3, 0.6, 0.9, 1.2].into_iter().enumerate() {
            let v: Vec<f64> = (0..n).map(|i| if (j >> i) & 1 == 0 { 1.0 } else { -1.0 }).collect();
            push(format!("cube{n}-trunc{j}"), shapes::truncate(&shapes::cube(n), &v, &vec![0.0; n], depth));
        }
        let simplex_vertex: Vec<f64> = {
            let normals = shapes::regular_simplex_normals(n);
            normals[0].iter().map(|x| -x * n as f64).collect()
        };
        for depth in [0.5, 1.0, 2.0] {
            push(
                format!("simplex{n}-trunc{depth}"),
                shapes::truncate(&shapes::regular_simplex(n), &simplex_vertex, &vec![0.0; n], depth),
            );
        }
    }
    push("dodecahedron".into(), Ok(shapes::dodecahedron()));
    for k in 3..=12 {
        push(format!("prism{k}"), Ok(shapes::prism(k, 1.0)));
    }
    for i in 0..10 {
        let w = [1.0, 1.0 + 0.3 * i as f64, 2.0 + 0.7 * (i % 3) as f64];
        push(format!("cuboid{i}"), Ok(shapes::cuboid(&w)));
    }
    for n in 1..=2 {
        for c in [1.0, 10.0, 100.0] {
            if let Ok(spec) = hexagon_family(n, c) {
                push(format!("hexagon{n}-C{c}"), build(&spec).map(|s| s.polytope).map_err(|_| {
                    polyspread::geometry::GeometryError::Degenerate
                }));
            }
        }
    }
    // 4- and 5-dimensional products
    for a in 3..=6 {
        for b in a..=6 {
            push(format!("polygon{a}x{b}"), shapes::product(&shapes::regular_polygon(a, 0.0), &shapes::regular_polygon(b, 0.3)));
        }
    }
    let threes = [
        ("cube", shapes::cube(3)),
        ("octahedron", shapes::cross_polytope(3)),
        ("dodecahedron", shapes::dodecahedron()),
        ("prism5", shapes::prism(5, 1.0)),
    ];
    for (name, p) in &threes {
        for k in [3, 4, 6] {
            push(format!("{name}xpolygon{k}"), shapes::product(p, &shapes::regular_polygon(k, 0.1)));
        }
    }
    // random tangent polytopes
    for (n, lo, hi, count) in [(3, 8, 40, 60), (4, 10, 30, 40), (5, 12, 26, 30)] {
        let mut made = 0;
        let mut seed = 1000 * n as u64;
        while made < count {
            let m = lo + (seed as usize % (hi - lo + 1));
            let sample = sample_sphere(n, m, seed).unwrap();
            seed += 1;
            if let Ok(p) = shapes::tangent_polytope(&sample.points) {
                push(format!("random{n}-{m}-{seed}"), Ok(p));
                made += 1;
            }
        }
    }
    out
}

#[test]
fn criterion_03_spread_bound_corpus() {
    let t = Instant::now();
    let corpus = spread_corpus();
    let opts = SearchOptions { mode: SearchMode::Auto, budget: 5_000, map: MapOptions::default() };
    let results: Vec<(String, usize, Option<f64>)> = corpus
        .par_iter()
        .map(|(name, p)| {
            let inst = SpreadInstance::from_polytope(p).unwrap();
            let d = search_spread(&inst, p.dim(), Weight::Angular, opts)
                .ok()
                .filter(|c| matches!(c.degree, DegreeStatus::Computed(deg) if deg != 0))
                .map(|c| c.d);
            (name.clone(), p.dim(), d)
        })
        .collect();
    let mut violations = Vec::new();
    let mut certified = [0usize; 6];
    let mut worst = [0.0f64; 6];
    for (name, n, d) in &results {
        if let Some(d) = d {
            certified[*n] += 1;
            let bound = 2.0 * (*n as f64 - 1.0) * (*n as f64).sqrt();
            worst[*n] = worst[*n].max(d / bound);
            if *d > bound {
                violations.push(format!("{name}: {d} > {bound}"));
            }
        }
    }
    let per_dim: Vec<usize> = (3..=5).map(|n| results.iter().filter(|r| r.1 == n).count()).collect();
    let detail = format!(
        "{} polytopes (n=3/4/5: {:?}), certified {}/{}/{}, largest d/bound {:.3}/{:.3}/{:.3}, violations {:?}",
        results.len(),
        per_dim,
        certified[3],
        certified[4],
        certified[5],
        worst[3],
        worst[4],
        worst[5],
        violations
    );
    let ok = report(
        3,
        &[
            ("at least 200 polytopes", results.len() >= 200),
            ("every dimension certified", certified[3..].iter().all(|c| *c > 0)),
            ("no violations", violations.is_empty()),
        ],
        &detail,
        t.elapsed(),
        Duration::from_secs(600),
    );
    assert!(ok);
}

#[test]
fn criterion_04_hexagon_skyscraper() {
    let t = Instant::now();
    let n = 3;
    let spec = hexagon_family(n, 1000.0).unwrap();
    let sky = build(&spec).unwrap();
    let r = verify(&sky, &spec).unwrap();
    let study = asymptotic_study(&spec, &[1.0, 10.0, 100.0, 1000.0]).unwrap();
    let last = study.rows.last().unwrap();
    let side_increasing = study.rows.windows(2).all(|w| w[1].min_side_angle >= w[0].min_side_angle - 1e-12);
    let checks = [
        ("built with bullet_∩", r.intersection_ok),
        ("facet count 1 + 3·2N", r.facet_count == 1 + 6 * n),
        ("side angle within 0.01 of π/3", (last.min_side_angle - PI / 3.0).abs() < 0.01),
        ("side angle monotone in C", side_increasing),
        ("bottom angles > π/2", study.rows.iter().all(|x| x.min_bottom_angle > PI / 2.0)),
        // 2N cones meeting only consecutive cones force a diameter of 2N;
        // N+1 counts N cones and cannot hold together
        // with the 1 + 3·2N facet count
        ("comb diameter = N+1", r.comb_diameter == (n + 1) as f64),
    ];
    let detail = format!(
        "facets {}, side {:.5} (π/3 = {:.5}), bottom {:.5}, comb diameter {}",
        r.facet_count,
        last.min_side_angle,
        PI / 3.0,
        last.min_bottom_angle,
        r.comb_diameter
    );
    let ok = report(4, &checks, &detail, t.elapsed(), Duration::from_secs(30));
    assert!(ok);
}

#[test]
fn criterion_05_rounding_convergence() {
    let t = Instant::now();
    let cube = shapes::cube(3);
    let study = convergence_study(&cube, &[0.2, 0.1, 0.05], &[(0, 1)], &[0.1]).unwrap();
    let fine = study.rows.iter().find(|r| r.epsilon == 0.05).unwrap();
    let regions = round(&cube, 0.05, 0.1)
        .unwrap()
        .nat_distance(&VertexSet::FaceRegion(4), &VertexSet::FaceRegion(5))
        .unwrap();
    let simplex = shapes::regular_simplex(3);
    let target = (-1.0f64 / 3.0).acos();
    let adjacent = round(&simplex, 0.05, 0.1)
        .unwrap()
        .nat_distance(
            &VertexSet::FaceInterior { facet: 0, shrink: 0.5 },
            &VertexSet::FaceInterior { facet: 1, shrink: 0.5 },
        )
        .unwrap();
    let checks = [
        ("centroids within 0.05 of π", fine.error < 0.05),
        ("error decreasing in ε", study.decreasing),
        ("face sets within 0.05 of π/2", (regions - PI / 2.0).abs() < 0.05),
        ("simplex within 0.05 of arccos(-1/3)", (adjacent - target).abs() < 0.05),
    ];
    let errors: Vec<String> = study.rows.iter().map(|r| format!("{:.2e}", r.error)).collect();
    let detail = format!(
        "cube errors {} at ε = 0.2/0.1/0.05, face sets {regions:.5}, simplex {adjacent:.5} vs {target:.5}",
        errors.join("/")
    );
    let ok = report(5, &checks, &detail, t.elapsed(), Duration::from_secs(120));
    assert!(ok);
}

#[test]
fn criterion_06_lipschitz_map() {
    let t = Instant::now();
    let p = shapes::cube(3);
    let lattice = enumerate_faces(&p).unwrap();
    let g = build_edge_graph(&p).unwrap();
    let labeling = CubeLabeling::natural_cube(3);
    let d_prime = PI * (1.0 + 1e-3);
    let bound = 2.0 * 3f64.sqrt() / d_prime;
    let resolutions = [1, 2, 4];
    let maps: Vec<_> = resolutions
        .iter()
        .map(|r| build_cube_map(&p, &lattice, &g, &labeling, Weight::Angular, d_prime, *r).unwrap())
        .collect();
    let degrees: Vec<i64> = maps.iter().map(|m| m.degree(0).unwrap()).collect();
    let finest = maps.last().unwrap().lipschitz;
    let checks = [
        ("Lipschitz ratio ≤ 2√3/D′ + 0.05", finest.measured <= bound + 0.05),
        ("degree ±1", degrees.iter().all(|d| d.abs() == 1)),
        ("degree stable under refinement", degrees.windows(2).all(|w| w[0] == w[1])),
    ];
    let detail = format!(
        "measured {:.5} vs bound {:.5} at resolution {} ({} edges), degrees {degrees:?}",
        finest.measured,
        bound,
        resolutions.last().unwrap(),
        finest.edges
    );
    let ok = report(6, &checks, &detail, t.elapsed(), Duration::from_secs(60));
    assert!(ok);
}

#[test]
fn criterion_07_normal_fan_partition() {
    let t = Instant::now();
    let polys = random_simple_3_polytopes(50, 7);
    let errors: Vec<f64> = polys
        .iter()
        .map(|p| {
            let lattice = enumerate_faces(p).unwrap();
            let total: f64 = lattice.by_dim[0]
                .iter()
                .map(|&v| {
                    let c = coangle(p, &lattice, v, CoangleMethod::Exact, 0, 0).unwrap();
                    assert_eq!(c.method, CoangleMethod::Exact);
                    c.value
                })
                .sum();
            (total - 4.0 * PI).abs()
        })
        .collect();
    let worst = errors.iter().copied().fold(0.0, f64::max);
    let ok = report(
        7,
        &[("50 polytopes", polys.len() == 50), ("Σ coangles = 4π within 1e-6", worst < 1e-6)],
        &format!("largest |Σ - 4π| = {worst:.2e}"),
        t.elapsed(),
        Duration::from_secs(30),
    );
    assert!(ok);
}

#[test]
fn criterion_08_random_polytopes() {
    let t = Instant::now();
    let config = ExperimentConfig {
        n: 3,
        sizes: vec![10, 20, 40],
        trials: 20,
        queries: 1,
        mode: QueryMode::Antipodal,
        seed: 2024,
    };
    let result = run_experiment(&config).unwrap();
    let again = run_experiment(&config).unwrap();
    let cvs: Vec<f64> = result.aggregates.iter().map(|a| a.comb.cv).collect();
    let (up, lo) = result.band_deviation();
    let points: Vec<usize> = result.aggregates.iter().map(|a| a.points).collect();
    let checks = [
        ("point counts N²", points == vec![100, 400, 1600]),
        ("cv strictly decreasing", cvs.windows(2).all(|w| w[1] < w[0])),
        ("band constants within 50% across N", up <= 0.5 && lo <= 0.5),
        ("bit-identical rerun", result.to_csv() == again.to_csv()),
    ];
    let bands: Vec<String> = result
        .aggregates
        .iter()
        .map(|a| format!("[{:.3}, {:.3}]", a.band_lower, a.band_upper))
        .collect();
    let detail = format!(
        "cv {:?}, band constants {} (deviation {up:.3}/{lo:.3})",
        cvs.iter().map(|c| format!("{c:.4}")).collect::<Vec<_>>(),
        bands.join(" ")
    );
    let ok = report(8, &checks, &detail, t.elapsed(), Duration::from_secs(300));
    assert!(ok);
}

#[test]
fn criterion_09_overlap_counts() {
    let t = Instant::now();
    let polys = random_simple_3_polytopes(20, 90);
    let results: Vec<((usize, usize), usize)> = polys
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let lattice = enumerate_faces(p).unwrap();
            let map = generic_map(3, 2, i as u64);
            let opts = ProbeOptions { uniform: 1000, critical: true, seed: i as u64 };
            let probe = probe_fibers(p, &lattice, &map, 2, opts).unwrap();
            let uniform = probe.rows.iter().filter(|r| r.kind == polyspread::waists::SampleKind::Uniform).count();
            (probe.overlap_counts(), uniform)
        })
        .collect();
    let bad: Vec<(usize, (usize, usize))> =
        results.iter().enumerate().filter(|(_, r)| r.0 != (2, 4)).map(|(i, r)| (i, r.0)).collect();
    let min_uniform = results.iter().map(|r| r.1).min().unwrap_or(0);
    let ok = report(
        9,
        &[
            ("20 polytopes", results.len() == 20),
            ("≥ 1000 fiber samples each", min_uniform >= 1000),
            ("open 2 and closed 4", bad.is_empty()),
        ],
        &format!("at least {min_uniform} uniform fibers each, mismatches {bad:?}"),
        t.elapsed(),
        Duration::from_secs(60),
    );
    assert!(ok);
}

/// Random proper rotation and scale.
fn motion(seed: u64) -> (Vec<Vec<f64>>, f64, Vec<f64>) {
    let mut r = generic_map(3, 3, seed);
    let det = polyspread::linalg::det(&r);
    if det < 0.0 {
        r[0].iter_mut().for_each(|x| *x = -*x);
    }
    let s = 0.1 * 100f64.powf((seed % 7) as f64 / 6.0);
    let t = vec![0.3 * seed as f64, -1.7, 2.0];
    (r, s, t)
}

/// Facet of `q` whose normal is the rotated normal of each facet of `p`.
fn facet_map(p: &HPolytope, q: &HPolytope, r: &[Vec<f64>]) -> Vec<usize> {
    (0..p.facet_count())
        .map(|f| {
            let u: Vec<f64> = r.iter().map(|row| dot(row, p.normal(f))).collect();
            (0..q.facet_count())
                .min_by(|a, b| arc(&u, q.normal(*a)).total_cmp(&arc(&u, q.normal(*b))))
                .unwrap()
        })
        .collect()
}

fn vertex_coangles(p: &HPolytope, lattice: &FaceLattice, relabel: &[usize]) -> Vec<(Vec<usize>, f64)> {
    let mut out: Vec<(Vec<usize>, f64)> = lattice.by_dim[0]
        .iter()
        .map(|&v| {
            let mut key: Vec<usize> = lattice.faces[v].active.iter().map(|f| relabel[*f]).collect();
            key.sort();
            (key, coangle(p, lattice, v, CoangleMethod::Exact, 0, 0).unwrap().value)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[test]
fn criterion_10_invariance() {
    let t = Instant::now();
    let mut polys = vec![shapes::cube(3), shapes::dodecahedron()];
    polys.extend(random_simple_3_polytopes(2, 300));
    let mut worst: [f64; 4] = [0.0; 4];
    let mut structural = true;
    for (i, p) in polys.iter().enumerate() {
        for trial in 0..3u64 {
            let (r, s, shift) = motion(10 * i as u64 + trial);
            let q = p.transformed(&r, s, &shift).unwrap();
            let fmap = facet_map(p, &q, &r);
            let identity: Vec<usize> = (0..p.facet_count()).collect();

            // angular distances
            let (gp, gq) = (build_edge_graph(p).unwrap(), build_edge_graph(&q).unwrap());
            let (dp, dq) = (gp.distance_matrix(Weight::Angular).unwrap(), gq.distance_matrix(Weight::Angular).unwrap());
            for a in 0..dp.len() {
                for b in 0..dp.len() {
                    worst[0] = worst[0].max((dp[a][b] - dq[fmap[a]][fmap[b]]).abs());
                }
            }

            // vertex coangles, matched by their facets
            let (lp, lq) = (enumerate_faces(p).unwrap(), enumerate_faces(&q).unwrap());
            let (cp, cq) = (vertex_coangles(p, &lp, &fmap), vertex_coangles(&q, &lq, &identity));
            structural &= cp.len() == cq.len();
            for (x, y) in cp.iter().zip(&cq) {
                structural &= x.0 == y.0;
                worst[1] = worst[1].max((x.1 - y.1).abs());
            }

            // certified spread of a searched labeling, moved along
            let ip = SpreadInstance::from_polytope(p).unwrap();
            let iq = SpreadInstance::from_polytope(&q).unwrap();
            let cert = search_spread(&ip, 3, Weight::Angular, SearchOptions::default()).unwrap();
            let mut moved = cert.labeling.clone();
            for axis in &mut moved.axes {
                axis.minus.iter_mut().for_each(|f| *f = fmap[*f]);
                axis.plus.iter_mut().for_each(|f| *f = fmap[*f]);
            }
            let cq_cert = certify(&iq, &moved, Weight::Angular, MapOptions::default()).unwrap();
            worst[2] = worst[2].max((cert.d - cq_cert.d).abs());
            structural &= match (cert.degree, cq_cert.degree) {
                (DegreeStatus::Computed(a), DegreeStatus::Computed(b)) => a.abs() == b.abs() && a != 0,
                _ => false,
            };

            // ♮-distance with ε scaled along
            let eps = 0.4 * polyspread::rounding::disjoint_face_distance(p, &lp).min(1.0);
            let mp = round(p, eps, 0.2).unwrap();
            let mq = round(&q, eps * s, 0.2).unwrap();
            let (a, b) = (0, p.facet_count() - 1);
            let np = mp
                .nat_distance(
                    &VertexSet::FaceInterior { facet: a, shrink: 0.5 },
                    &VertexSet::FaceInterior { facet: b, shrink: 0.5 },
                )
                .unwrap();
            let nq = mq
                .nat_distance(
                    &VertexSet::FaceInterior { facet: fmap[a], shrink: 0.5 },
                    &VertexSet::FaceInterior { facet: fmap[b], shrink: 0.5 },
                )
                .unwrap();
            worst[3] = worst[3].max((np - nq).abs());
        }
    }
    let checks = [
        ("dist_ang", worst[0] < 1e-6),
        ("coangles", worst[1] < 1e-6),
        ("certified spread", worst[2] < 1e-6),
        ("♮-distance", worst[3] < 1e-6),
        ("face structure preserved", structural),
    ];
    let detail = format!(
        "largest deviations: dist_ang {:.1e}, coangle {:.1e}, spread {:.1e}, ♮ {:.1e}",
        worst[0], worst[1], worst[2], worst[3]
    );
    let ok = report(10, &checks, &detail, t.elapsed(), Duration::from_secs(60));
    assert!(ok);
}

