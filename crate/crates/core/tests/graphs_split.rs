mod common;

use persets::graph::{GraphFamily, GraphPoint, MetricGraph};
use persets::principal::{principal_diagram, principal_point};
use persets::regions::RegionSpec;
use persets::sampling::{sample_persistence_set, SampleConfig};
use persets::spaces::Space;
use persets::split::{detect_corners, split_decompose, tight_span_persistence, DEFAULT_MIN_SUPPORT, DEFAULT_REL_TOL};
use rand::Rng;

#[test]
fn decomposition_reconstructs_the_metric() {
    let mut rng = common::rng(7);
    for i in 0..10_000 {
        let m = common::random_four_point(&mut rng, i);
        let dec = split_decompose(&m).unwrap();
        assert!(dec.b <= dec.c, "{dec:?}");
        assert!(dec.b >= -1e-12);
        assert!(dec.pendant.iter().all(|&a| a >= -1e-12), "{dec:?}");
        let r = dec.reconstruct();
        for x in 0..4 {
            for y in 0..4 {
                assert!((r.get(x, y) - m.get(x, y)).abs() <= 1e-9, "{m:?} vs {r:?}");
            }
        }
    }
}

#[test]
fn tight_span_agrees_with_the_principal_diagram() {
    let mut rng = common::rng(8);
    for i in 0..10_000 {
        let m = common::random_four_point(&mut rng, i);
        let a = tight_span_persistence(&split_decompose(&m).unwrap()).point;
        let b = principal_diagram(&m, 1).unwrap().point;
        match (a, b) {
            (None, None) => {}
            (Some(p), Some(q)) => assert!((p.0 - q.0).abs() <= 1e-9 && (p.1 - q.1).abs() <= 1e-9, "{p:?} {q:?}"),
            _ => panic!("emptiness differs on {m:?}: {a:?} vs {b:?}"),
        }
    }
}

#[test]
fn trees_have_a_zero_box() {
    let mut rng = common::rng(9);
    for _ in 0..500 {
        let size = rng.random_range(2..8);
        let t = common::random_tree(&mut rng, size);
        let pts: Vec<GraphPoint> = (0..4).map(|_| t.draw(&mut rng)).collect();
        let m = common::matrix_from(4, |a, b| t.dist(&pts[a], &pts[b]));
        // four-point condition: one of the box sides vanishes
        assert!(split_decompose(&m).unwrap().b.abs() < 1e-9);
    }
}

fn betti_report(descriptor: &str, seed: u64) -> (MetricGraph, persets::split::CornerReport) {
    let g = descriptor.parse::<GraphFamily>().unwrap().build().unwrap();
    let s = sample_persistence_set(&g, &SampleConfig::new(4, 1, 100_000, seed)).unwrap();
    let r = detect_corners(&s, DEFAULT_REL_TOL, DEFAULT_MIN_SUPPORT).unwrap();
    (g, r)
}

fn assert_recovers(descriptor: &str, seed: u64) {
    let (g, r) = betti_report(descriptor, seed);
    let mut want: Vec<f64> = g.declared_cycles().iter().map(|c| c.length / 2.0).collect();
    want.sort_by(f64::total_cmp);
    assert_eq!(r.estimated_betti, g.betti_number(), "{descriptor}: {r:?}");
    assert_eq!(r.corners.len(), want.len());
    for (c, w) in r.corners.iter().zip(&want) {
        assert!((c.lambda - w).abs() <= 0.02 * w, "{descriptor}: λ {} vs {w}", c.lambda);
    }
}

#[test]
fn glued_cycles_are_recovered() {
    assert_recovers("glued:3.5,4.5:alpha=0.5", 1);
}

#[test]
fn tree_of_cycles_is_recovered() {
    assert_recovers("tree:c=3.6@v0;t=0.5@v2;c=4.6@v4", 2);
}

#[test]
fn wedge_is_recovered() {
    assert_recovers("wedge:3.2,4", 3);
}

#[test]
fn tuples_on_one_glued_cycle_see_only_that_circle() {
    // both declared cycles are isometrically embedded: the detour through
    // the other cycle is longer than the shared path
    let g: MetricGraph = "glued:3.5,4.5:alpha=0.5".parse::<GraphFamily>().unwrap().build().unwrap();
    let cycles = g.declared_cycles().to_vec();
    let mut rng = common::rng(12);
    let (mut on_one, mut near_corner) = (0, 0);
    for _ in 0..200_000 {
        let pts: Vec<GraphPoint> = (0..4).map(|_| g.draw(&mut rng)).collect();
        let mut flat = [0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                flat[i * 4 + j] = g.dist(&pts[i], &pts[j]);
            }
        }
        let Some((tb, td)) = principal_point(&flat, 4) else { continue };
        for c in &cycles {
            let lambda = c.length / 2.0;
            let inside = pts.iter().all(|p| g.point_on_edges(p, &c.edges));
            if inside {
                on_one += 1;
                assert!(RegionSpec::circle_k(1, lambda).contains(tb, td, 1e-9), "({tb}, {td}) on λ = {lambda}");
            }
            if (tb - lambda / 2.0).abs() <= 0.02 * lambda && (td - lambda).abs() <= 0.02 * lambda {
                near_corner += 1;
                assert!(inside, "straddling tuple near λ = {lambda}");
            }
        }
    }
    assert!(on_one > 1000 && near_corner > 0, "{on_one} {near_corner}");
}

#[test]
fn flares_leave_the_bare_circle_region() {
    let d = "flares:c=6.283185307179586,angles=0;1.5707963267948966;3.141592653589793;5.497787143782138,L=1";
    let g = d.parse::<GraphFamily>().unwrap().build().unwrap();
    let s = sample_persistence_set(&g, &SampleConfig::new(4, 1, 100_000, 4)).unwrap();
    let f = s.nontrivial_fraction();
    assert!((f - 0.076).abs() <= 0.01, "fraction {f}");
    let bare = RegionSpec::circle();
    assert!(s.nontrivial_points.iter().any(|&(b, d)| !bare.contains(b, d, 1e-9)));
}

#[test]
fn cycle_distances_match_the_circle() {
    let g = "cycle:c=6.283185307179586,segments=8".parse::<GraphFamily>().unwrap().build().unwrap();
    let m = g.vertex_matrix();
    for i in 0..8 {
        for j in 0..8 {
            let steps = (i as f64 - j as f64).abs();
            let want = steps.min(8.0 - steps) * std::f64::consts::PI / 4.0;
            assert!((m.get(i, j) - want).abs() < 1e-12);
        }
    }
    assert_eq!(g.betti_number(), 1);
}
