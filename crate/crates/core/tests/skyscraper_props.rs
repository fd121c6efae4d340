use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;

use polyspread::geometry::{complementary_angle, shapes, HPolytope};
use polyspread::linalg::arc;
use polyspread::skyscraper::{build, hexagon_bases, hexagon_family, hexagon_spec, verify, SkyscraperSpec};

fn min_angle(p: &HPolytope) -> f64 {
    let m = p.facet_count();
    (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .filter_map(|(i, j)| complementary_angle(p, i, j).ok())
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Scaling every λ_i and every height by `s` scales the whole skyscraper,
    /// so its facet normals do not move.
    #[test]
    fn scaling_keeps_normals(n in 1usize..3, stretch in 1.0f64..200.0, s in 0.1f64..10.0) {
        let spec = hexagon_family(n, stretch).unwrap();
        let big = SkyscraperSpec {
            scales: spec.scales.iter().map(|l| l * s).collect(),
            heights: spec.heights.iter().map(|h| h * s).collect(),
            ..spec.clone()
        };
        let (a, b) = (build(&spec).unwrap(), build(&big).unwrap());
        prop_assert_eq!(a.polytope.facet_count(), b.polytope.facet_count());
        prop_assert_eq!(&a.origins, &b.origins);
        for f in 0..a.polytope.facet_count() {
            prop_assert!(arc(a.polytope.normal(f), b.polytope.normal(f)) < 1e-9);
            let offset = (a.polytope.halfspaces()[f].offset * s - b.polytope.halfspaces()[f].offset).abs();
            prop_assert!(offset < 1e-9 * s.max(1.0) * a.polytope.scale());
        }
    }

    /// A valid intersection pattern always has one facet per cone facet
    /// plus the floor.
    #[test]
    fn intersection_implies_facet_count(
        n in 1usize..5,
        stretch in 0.5f64..100.0,
        jitter in prop::collection::vec(0.8f64..1.25, 8),
    ) {
        let base = hexagon_spec(n, stretch);
        let mut spec = base.clone();
        for i in 1..n {
            spec.scales[i] = (base.scales[i] * jitter[i]).max(spec.scales[i - 1] * 2.01);
        }
        for i in 0..n {
            spec.heights[i] = base.heights[i] * jitter[4 + i % 4];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            spec.heights[i] = spec.heights[i].max(spec.heights[i + 1] * 1.01);
        }
        prop_assume!(spec.validate().is_ok());
        let report = verify(&build(&spec).unwrap(), &spec).unwrap();
        if report.intersection_ok {
            prop_assert!(report.facet_count_ok, "{report:?}");
        }
    }

    /// Normals of a product are orthogonal across factors, so its smallest
    /// complementary angle is that of the factors, capped at π/2.
    #[test]
    fn product_min_angle(s1 in 1.0f64..50.0, s2 in 1.0f64..50.0, two_cones in any::<bool>()) {
        let factor = |stretch| {
            let spec = if two_cones {
                hexagon_family(1, stretch).unwrap()
            } else {
                SkyscraperSpec { bases: hexagon_bases(1), scales: vec![1.0], heights: vec![1.0], stretch }
            };
            build(&spec).unwrap().polytope
        };
        let (a, b) = (factor(s1), factor(s2));
        let prod = shapes::product(&a, &b).unwrap();
        let factors = min_angle(&a).min(min_angle(&b));
        let got = min_angle(&prod);
        prop_assert!((got - factors.min(FRAC_PI_2)).abs() < 1e-9, "{got} vs {factors}");
        if two_cones {
            prop_assert!(got >= factors - 1e-9);
        }
    }
}
