//! End-to-end acceptance run. Prints one line per criterion and exits with
//! status 1 if any fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use persets::bottleneck::{cross_polytope_bound, gh_lower_bound, one_point_bottleneck, principal_hausdorff};
use persets::graph::{GraphFamily, MetricGraph};
use persets::oracle::{build_vr_filtration, reduce, Diagram};
use persets::principal::{principal_diagram, principal_point, PrincipalDiagram};
use persets::regions::{circle_density, RegionSpec};
use persets::sampling::{
    density_l1_error, histogram, sample_persistence_set, two_point_measure, DensityFn, PersistenceSetSample,
    SampleConfig,
};
use persets::spaces::{FiniteMmSpace, SpaceModel};
use persets::split::{detect_corners, split_decompose, tight_span_persistence, DEFAULT_MIN_SUPPORT, DEFAULT_REL_TOL};
use persets::DistanceMatrix;
use rand::Rng;

const MILLION: u64 = 1_000_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn reduced(m: &DistanceMatrix, k: usize) -> Vec<(f64, f64)> {
    // with k + 1 ≥ n the degree-k chains are spanned by at most one simplex,
    // whose boundary is nonzero for k ≥ 1, so there are no cycles
    if k >= 1 && k + 1 >= m.size() {
        return Vec::new();
    }
    reduce(&build_vr_filtration(m, k + 1).unwrap()).unwrap().swap_remove(k).points
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(101);
    let mut mismatches = 0;
    for k in 0..3 {
        let n = 2 * k + 2;
        for i in 0..1000 {
            let m = if i % 2 == 0 { common::cloud_matrix(&mut rng, n) } else { common::circle_matrix(&mut rng, n) };
            let fast = principal_diagram(&m, k).unwrap().point;
            let slow = reduced(&m, k);
            let same = match fast {
                None => slow.is_empty(),
                Some((b, d)) => slow.len() == 1 && (slow[0].0 - b).abs() <= 1e-12 && (slow[0].1 - d).abs() <= 1e-12,
            };
            mismatches += usize::from(!same);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(mismatches == 0 && secs < 30.0, format!("3000 matrices, {mismatches} mismatches, {secs:.2} s"))
}

fn emptiness_below_threshold() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(102);
    let (mut cases, mut nonempty) = (0, 0);
    for n in 2..=8usize {
        // smallest k with k > n/2 − 1, up to the largest degree with simplices
        for k in (n / 2)..=(n / 2).max(n.saturating_sub(2)) {
            for i in 0..500 {
                let m = if i % 2 == 0 { common::cloud_matrix(&mut rng, n) } else { common::circle_matrix(&mut rng, n) };
                cases += 1;
                nonempty += usize::from(!reduced(&m, k).is_empty());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(nonempty == 0 && secs < 60.0, format!("{cases} matrices, {nonempty} nonempty, {secs:.2} s"))
}

fn circle_fraction(s: &PersistenceSetSample, secs: f64) -> Outcome {
    let f = s.nontrivial_fraction();
    let pass = (f - 1.0 / 9.0).abs() <= 0.01 && secs < 10.0;
    outcome(pass, format!("fraction {f:.6} (1/9 = {:.6}), {secs:.2} s on {} worker(s)", 1.0 / 9.0, workers()))
}

fn circle_region(s: &PersistenceSetSample) -> Outcome {
    let region = RegionSpec::circle();
    let outside = s.nontrivial_points.iter().filter(|&&(b, d)| !region.contains(b, d, 1e-9)).count();
    let mut pts = s.nontrivial_points.clone();
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let nearest = |(b, d): (f64, f64)| {
        let start = pts.partition_point(|p| p.0 < b);
        let mut best = f64::INFINITY;
        for p in &pts[start..] {
            if p.0 - b >= best {
                break;
            }
            best = best.min((p.0 - b).hypot(p.1 - d));
        }
        for p in pts[..start].iter().rev() {
            if b - p.0 >= best {
                break;
            }
            best = best.min((p.0 - b).hypot(p.1 - d));
        }
        best
    };
    let grid = region.boundary_points(1e-2);
    let h = grid.iter().map(|&q| nearest(q)).fold(0.0, f64::max);
    outcome(
        outside == 0 && h <= 0.05,
        format!("{outside} points outside, boundary-to-sample Hausdorff {h:.4} over {} grid points", grid.len()),
    )
}

fn even_k_region() -> Outcome {
    let s = sample_persistence_set(&SpaceModel::circle(), &SampleConfig::new(6, 2, MILLION, 105).workers(workers()))
        .unwrap();
    let region = RegionSpec::circle_k(2, PI);
    let bad =
        s.nontrivial_points.iter().filter(|&&(b, d)| b < 2.0 * PI / 3.0 - 1e-9 || !region.contains(b, d, 1e-9)).count();
    let min_b = s.nontrivial_points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    outcome(
        bad == 0 && !s.nontrivial_points.is_empty(),
        format!(
            "{} nontrivial, {bad} violations, min t_b {min_b:.6} (2π/3 = {:.6})",
            s.nontrivial_points.len(),
            2.0 * PI / 3.0
        ),
    )
}

fn density_check(s: &PersistenceSetSample) -> Outcome {
    let h = histogram(s, 50, 50, Some(((0.0, PI), (0.0, PI))));
    let density = DensityFn::with_total(circle_density, 1.0 / 9.0);
    let err = density_l1_error(&h, &density).unwrap();
    // the inner integral over t_b ∈ [π − t_d/2, t_d] is exact for a density in t_d alone
    let region = RegionSpec::circle();
    let inner = |td: f64| {
        let lo = region.left_boundary(td).unwrap_or(td);
        (td - lo).max(0.0) * circle_density((lo + td) / 2.0, td)
    };
    let total = common::simpson(inner, 2.0 * PI / 3.0, PI, 2000);
    outcome(
        err <= 0.05 && (total - 1.0 / 9.0).abs() <= 1e-6,
        format!("L1 {err:.4} on 50x50 bins, integral {total:.12}"),
    )
}

fn model_surfaces() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for (space, kappa) in [("mk:kappa=1", 1.0f64), ("mk:kappa=-1,r=3.141592653589793", -1.0)] {
        let sp: SpaceModel = space.parse().unwrap();
        let s = sample_persistence_set(&sp, &SampleConfig::new(4, 1, 100_000, 107).workers(workers())).unwrap();
        let region = RegionSpec::model_surface(kappa);
        let bad = s
            .nontrivial_points
            .iter()
            .filter(|&&(b, d)| !region.contains(b, d, 1e-6) || (kappa > 0.0 && d > PI + 1e-9))
            .count();
        pass &= bad == 0 && !s.nontrivial_points.is_empty();
        details.push(format!("κ={kappa}: {} nontrivial, {bad} violations", s.nontrivial_points.len()));
    }
    outcome(pass, details.join("; "))
}

fn euclidean_circle_and_sphere(geodesic: &PersistenceSetSample) -> Outcome {
    let s1e_region: RegionSpec = "s1-e".parse().unwrap();
    let s1e =
        sample_persistence_set(&"s1-e".parse::<SpaceModel>().unwrap(), &SampleConfig::new(4, 1, 100_000, 108)).unwrap();
    let bad1 = s1e.nontrivial_points.iter().filter(|&&(b, d)| !s1e_region.contains(b, d, 1e-9)).count();
    let s2e =
        sample_persistence_set(&"s2-e".parse::<SpaceModel>().unwrap(), &SampleConfig::new(4, 1, 100_000, 109)).unwrap();
    let bad2 = s2e.nontrivial_points.iter().filter(|&&(b, d)| d > (2f64.sqrt() * b).min(2.0) + 1e-9).count();
    let chord = |t: f64| 2.0 * (t / 2.0).sin();
    let bad3 =
        geodesic.nontrivial_points.iter().filter(|&&(b, d)| !s1e_region.contains(chord(b), chord(d), 1e-6)).count();
    outcome(
        bad1 + bad2 + bad3 == 0 && !s1e.nontrivial_points.is_empty() && !s2e.nontrivial_points.is_empty(),
        format!("S1_E {bad1}, S2_E {bad2}, chord image {bad3} violations"),
    )
}

fn gh_bounds() -> Outcome {
    let s1 = RegionSpec::circle().diagram_set(1e-3, 2e-2);
    let s2 = RegionSpec::model_surface(1.0).diagram_set(1e-3, 2e-2);
    let h = principal_hausdorff(&s1, &s2).unwrap();
    let as_diagrams = |v: &[PrincipalDiagram]| -> Vec<Diagram> {
        v.iter().map(|p| Diagram::new(1, p.point.into_iter().collect())).collect()
    };
    let gh = gh_lower_bound(&as_diagrams(&s1), &as_diagrams(&s2)).unwrap();
    let cp = cross_polytope_bound(3);
    outcome(
        (h - 0.4293).abs() <= 0.01 && (gh - 0.2147).abs() <= 0.005 && cp == PI / 8.0,
        format!("Hausdorff {h:.6}, GH bound {gh:.6}, cross-polytope k=3 {cp} (π/8 = {})", PI / 8.0),
    )
}

fn recovered(descriptor: &str, seed: u64) -> (bool, String) {
    let g: MetricGraph = descriptor.parse::<GraphFamily>().unwrap().build().unwrap();
    let s = sample_persistence_set(&g, &SampleConfig::new(4, 1, 100_000, seed).workers(workers())).unwrap();
    let r = detect_corners(&s, DEFAULT_REL_TOL, DEFAULT_MIN_SUPPORT).unwrap();
    let mut want: Vec<f64> = g.declared_cycles().iter().map(|c| c.length / 2.0).collect();
    want.sort_by(f64::total_cmp);
    let got: Vec<f64> = r.corners.iter().map(|c| c.lambda).collect();
    let ok = r.estimated_betti == g.betti_number()
        && got.len() == want.len()
        && got.iter().zip(&want).all(|(g, w)| (g - w).abs() <= 0.02 * w);
    (
        ok,
        format!("{descriptor}: betti {} (want {}), λ {got:.3?} (want {want:.3?})", r.estimated_betti, g.betti_number()),
    )
}

fn graph_betti() -> Outcome {
    let (ok1, d1) = recovered("glued:3.5,4.5:alpha=0.5", 110);
    let (ok2, d2) = recovered("tree:c=3.6@v0;t=0.5@v2;c=4.6@v4", 111);
    let flares = "flares:c=6.283185307179586,angles=0;1.5707963267948966;3.141592653589793;5.497787143782138,L=1";
    let g = flares.parse::<GraphFamily>().unwrap().build().unwrap();
    let s = sample_persistence_set(&g, &SampleConfig::new(4, 1, 100_000, 112).workers(workers())).unwrap();
    let f = s.nontrivial_fraction();
    let bare = RegionSpec::circle();
    let outside = s.nontrivial_points.iter().filter(|&&(b, d)| !bare.contains(b, d, 1e-9)).count();
    let ok3 = (f - 0.076).abs() <= 0.01 && outside > 0;
    outcome(ok1 && ok2 && ok3, format!("{d1}; {d2}; flares fraction {f:.4}, {outside} points outside the bare circle"))
}

fn stability() -> Outcome {
    let eta = 0.1;
    let mut rng = common::rng(113);
    let (mut worst, mut disagreements) = (0.0f64, 0);
    for i in 0..1000 {
        let m = if i % 2 == 0 { common::cloud_matrix(&mut rng, 4) } else { common::circle_matrix(&mut rng, 4) };
        let mut flat = m.as_slice().to_vec();
        for a in 0..4 {
            for b in (a + 1)..4 {
                let e = (flat[a * 4 + b] + rng.random_range(-eta..=eta)).max(0.0);
                flat[a * 4 + b] = e;
                flat[b * 4 + a] = e;
            }
        }
        let p = principal_diagram(&m, 1).unwrap().point;
        let q = principal_point(&flat, 4);
        let d = one_point_bottleneck(p, q);
        let brute = common::brute_bottleneck(&p.into_iter().collect::<Vec<_>>(), &q.into_iter().collect::<Vec<_>>());
        disagreements += usize::from((d - brute).abs() > 1e-12);
        worst = worst.max(d);
    }
    outcome(
        worst <= 0.1 + 1e-12 && disagreements == 0,
        format!("max bottleneck {worst:.6}, {disagreements} matcher disagreements"),
    )
}

fn two_point_concentration() -> Outcome {
    let mut pass = true;
    let mut worst_z = 0.0f64;
    for alpha in [0.3, 0.5] {
        let space = FiniteMmSpace::two_point(alpha, 1.0).unwrap();
        for n in [2u32, 5, 10] {
            let cfg = SampleConfig::new(n as usize, 0, MILLION, 114 + n as u64).workers(workers());
            let s = sample_persistence_set(&space, &cfg).unwrap();
            let w = two_point_measure(alpha, 1.0, n).unwrap().empty_mass;
            let sigma = (w * (1.0 - w) / MILLION as f64).sqrt();
            let got = s.trivial_count as f64 / MILLION as f64;
            let z = (got - w).abs() / sigma;
            worst_z = worst_z.max(z);
            pass &= z <= 3.0 && s.nontrivial_points.iter().all(|&p| p == (0.0, 1.0));
        }
    }
    let far = two_point_measure(0.5, 1.0, 40).unwrap().empty_mass;
    outcome(pass && far < 1e-3, format!("worst deviation {worst_z:.2}σ, empty mass at n=40 {far:.3e}"))
}

fn split_agreement() -> Outcome {
    let mut rng = common::rng(115);
    let (mut mismatches, mut worst) = (0, 0.0f64);
    for i in 0..10_000 {
        let m = common::random_four_point(&mut rng, i);
        let dec = split_decompose(&m).unwrap();
        let r = dec.reconstruct();
        for x in 0..4 {
            for y in 0..4 {
                worst = worst.max((r.get(x, y) - m.get(x, y)).abs());
            }
        }
        let same = match (tight_span_persistence(&dec).point, principal_diagram(&m, 1).unwrap().point) {
            (None, None) => true,
            (Some(p), Some(q)) => (p.0 - q.0).abs() <= 1e-9 && (p.1 - q.1).abs() <= 1e-9,
            _ => false,
        };
        mismatches += usize::from(!same);
    }
    outcome(mismatches == 0 && worst <= 1e-9, format!("{mismatches} mismatches, reconstruction error {worst:.2e}"))
}

fn performance(campaign_secs: f64) -> Outcome {
    let start = Instant::now();
    let s = sample_persistence_set(&SpaceModel::circle(), &SampleConfig::new(4, 1, MILLION, 116).workers(1)).unwrap();
    let rate = s.tuples_drawn as f64 / start.elapsed().as_secs_f64();
    outcome(
        campaign_secs < 10.0 && rate >= 3e5,
        format!("campaign {campaign_secs:.2} s on {} worker(s), single-thread {rate:.3e} diagrams/s", workers()),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |i: usize, name: &str, o: Outcome| {
        failed += usize::from(!o.pass);
        println!("criterion {i:>2} {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    };
    report(1, "oracle equivalence", oracle_equivalence());
    report(2, "emptiness below threshold", emptiness_below_threshold());

    let start = Instant::now();
    let circle =
        sample_persistence_set(&SpaceModel::circle(), &SampleConfig::new(4, 1, MILLION, 103).workers(workers()))
            .unwrap();
    let campaign = start.elapsed().as_secs_f64();
    report(3, "circle nontrivial fraction", circle_fraction(&circle, campaign));
    report(4, "circle region and coverage", circle_region(&circle));
    report(5, "even-degree region", even_k_region());
    report(6, "circle density", density_check(&circle));
    report(7, "model surfaces", model_surfaces());
    report(8, "Euclidean circle and sphere", euclidean_circle_and_sphere(&circle));
    report(9, "Gromov-Hausdorff bounds", gh_bounds());
    report(10, "graph Betti recovery", graph_betti());
    report(11, "stability", stability());
    report(12, "two-point concentration", two_point_concentration());
    report(13, "split-metric agreement", split_agreement());
    report(14, "performance", performance(campaign));

    if failed == 0 {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
