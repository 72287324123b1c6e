#![allow(dead_code)]

use std::f64::consts::PI;

use persets::graph::GraphPoint;
use persets::graph::{Edge, MetricGraph};
use persets::spaces::{circle_distance, Space};
use persets::DistanceMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn matrix_from(n: usize, f: impl Fn(usize, usize) -> f64) -> DistanceMatrix {
    let rows: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { f(i.min(j), i.max(j)) }).collect()).collect();
    DistanceMatrix::validate(&rows).expect("test matrix is a metric")
}

/// `n` uniform points in the unit cube of `R³`.
pub fn cloud_matrix(rng: &mut impl Rng, n: usize) -> DistanceMatrix {
    let pts: Vec<[f64; 3]> = (0..n).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
    matrix_from(n, |i, j| (0..3).map(|c| (pts[i][c] - pts[j][c]).powi(2)).sum::<f64>().sqrt())
}

/// `n` uniform points on the geodesic circle of circumference 2π.
pub fn circle_matrix(rng: &mut impl Rng, n: usize) -> DistanceMatrix {
    let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    matrix_from(n, |i, j| circle_distance(a[i], a[j]))
}

/// Random metric tree: vertex `i > 0` hangs off a uniformly chosen earlier
/// vertex by an edge of length in `[0.1, 2)`.
pub fn random_tree(rng: &mut impl Rng, vertices: usize) -> MetricGraph {
    let edges =
        (1..vertices).map(|v| Edge { u: rng.random_range(0..v), v, length: rng.random_range(0.1..2.0) }).collect();
    MetricGraph::new(vertices, edges).expect("tree is a valid graph")
}

/// Shortest-path closure of random positive weights on `K4`.
pub fn closure_matrix(rng: &mut impl Rng) -> DistanceMatrix {
    let mut d = [[0.0f64; 4]; 4];
    for i in 0..4 {
        for j in (i + 1)..4 {
            let w = rng.random_range(0.1..1.0);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for m in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                d[i][j] = d[i][j].min(d[i][m] + d[m][j]);
            }
        }
    }
    matrix_from(4, |i, j| d[i][j])
}

/// Cycles through R³ clouds, circle samples, shortest-path closures and
/// points on random trees.
pub fn random_four_point(rng: &mut impl Rng, i: usize) -> DistanceMatrix {
    match i % 4 {
        0 => cloud_matrix(rng, 4),
        1 => circle_matrix(rng, 4),
        2 => closure_matrix(rng),
        _ => {
            let size = rng.random_range(2..8);
            let t = random_tree(rng, size);
            let pts: Vec<GraphPoint> = (0..4).map(|_| t.draw(rng)).collect();
            matrix_from(4, |a, b| t.dist(&pts[a], &pts[b]))
        }
    }
}

/// Bottleneck distance by enumerating every partial matching.
pub fn brute_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn half(p: (f64, f64)) -> f64 {
        (p.1 - p.0) / 2.0
    }
    fn go(a: &[(f64, f64)], b: &[(f64, f64)], used: &mut Vec<bool>, i: usize, acc: f64) -> f64 {
        if i == a.len() {
            let rest = b.iter().zip(used.iter()).filter(|(_, u)| !**u).map(|(q, _)| half(*q)).fold(0.0, f64::max);
            return acc.max(rest);
        }
        let mut best = go(a, b, used, i + 1, acc.max(half(a[i])));
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                let c = (a[i].0 - b[j].0).abs().max((a[i].1 - b[j].1).abs());
                best = best.min(go(a, b, used, i + 1, acc.max(c)));
                used[j] = false;
            }
        }
        best
    }
    go(a, b, &mut vec![false; b.len()], 0, 0.0)
}

/// `∫ f` over `[a, b]` by composite Simpson with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}
