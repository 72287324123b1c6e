//! Four-point split decomposition, persistence from the tight span, and
//! corner-point detection for metric graphs.
//!
//! A four-point metric is realized by a rectangle with sides `b` and `c`
//! and a pendant edge of length `a_i` at each corner. Points are labeled so
//! that `x1, x3` and `x2, x4` sit at opposite corners; then
//!
//! ```text
//! d12 = a1 + a2 + b      d23 = a2 + a3 + c
//! d34 = a3 + a4 + b      d41 = a4 + a1 + c
//! d13 = a1 + a3 + b + c  d24 = a2 + a4 + b + c
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;
use crate::principal::PrincipalDiagram;
use crate::sampling::PersistenceSetSample;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitDecomposition {
    /// `a1..a4`, the isolation indices of the singleton splits.
    pub pendant: [f64; 4],
    /// `b`, the isolation index of `{x1, x4} | {x2, x3}`.
    pub b: f64,
    /// `c`, the isolation index of `{x1, x2} | {x3, x4}`.
    pub c: f64,
    /// The two input pairs whose split has isolation index zero.
    pub zero_split: [[usize; 2]; 2],
    /// `labeling[i]` is the input index of `x_{i+1}`.
    pub labeling: [usize; 4],
}

/// The three ways to split four points into pairs, in lexicographic order.
const PAIRINGS: [[[usize; 2]; 2]; 3] = [[[0, 1], [2, 3]], [[0, 2], [1, 3]], [[0, 3], [1, 2]]];

/// Decomposes a four-point (pseudo-)metric. The zero split is a pairing
/// maximizing `d(a,a') + d(b,b')` (lexicographically first on ties); its
/// pairs become the diagonals. `x2` and `x4` are ordered so that `b ≤ c`.
pub fn split_decompose(m: &DistanceMatrix) -> Result<SplitDecomposition> {
    if m.size() != 4 {
        return Err(Error::SizeMismatch { expected: 4, got: m.size() });
    }
    let sum = |p: &[[usize; 2]; 2]| m.get(p[0][0], p[0][1]) + m.get(p[1][0], p[1][1]);
    let mut zero = 0;
    for i in 1..3 {
        if sum(&PAIRINGS[i]) > sum(&PAIRINGS[zero]) {
            zero = i;
        }
    }
    let [[p, q], [r, s]] = PAIRINGS[zero];
    let mut dec = solve(m, [p, r, q, s]);
    if dec.b > dec.c {
        dec = solve(m, [p, s, q, r]);
    }
    dec.zero_split = PAIRINGS[zero];
    Ok(dec)
}

fn solve(m: &DistanceMatrix, labeling: [usize; 4]) -> SplitDecomposition {
    let d = |i: usize, j: usize| m.get(labeling[i - 1], labeling[j - 1]);
    let diag = d(1, 3) + d(2, 4);
    // each side sums its pair first so relabeling x2 <-> x4 swaps b and c exactly
    let c = 0.5 * (diag - (d(1, 2) + d(3, 4)));
    let b = 0.5 * (diag - (d(2, 3) + d(4, 1)));
    let pendant = [
        0.5 * (d(4, 1) + d(1, 2) - d(2, 4)),
        0.5 * (d(1, 2) + d(2, 3) - d(1, 3)),
        0.5 * (d(2, 3) + d(3, 4) - d(2, 4)),
        0.5 * (d(3, 4) + d(4, 1) - d(1, 3)),
    ];
    SplitDecomposition { pendant, b, c, zero_split: [[0, 0], [0, 0]], labeling }
}

impl SplitDecomposition {
    /// Path lengths in the rectangle-with-pendants graph, in input order.
    pub fn reconstruct(&self) -> DistanceMatrix {
        let [a1, a2, a3, a4] = self.pendant;
        let (b, c) = (self.b, self.c);
        let labeled = [
            [0.0, a1 + a2 + b, a1 + a3 + b + c, a4 + a1 + c],
            [a1 + a2 + b, 0.0, a2 + a3 + c, a2 + a4 + b + c],
            [a1 + a3 + b + c, a2 + a3 + c, 0.0, a3 + a4 + b],
            [a4 + a1 + c, a2 + a4 + b + c, a3 + a4 + b, 0.0],
        ];
        let mut inverse = [0; 4];
        for (i, &l) in self.labeling.iter().enumerate() {
            inverse[l] = i;
        }
        DistanceMatrix::from_fn_unchecked(4, |i, j| labeled[inverse[i]][inverse[j]])
    }
}

/// Degree-1 diagram read off the decomposition: nontrivial exactly when
/// `|a2−a1| < b`, `|a4−a3| < b`, `|a3−a2| < c` and `|a1−a4| < c`; then the
/// point is (longest side, shorter diagonal).
pub fn tight_span_persistence(dec: &SplitDecomposition) -> PrincipalDiagram {
    let [a1, a2, a3, a4] = dec.pendant;
    let (b, c) = (dec.b, dec.c);
    if !((a2 - a1).abs() < b && (a4 - a3).abs() < b && (a3 - a2).abs() < c && (a1 - a4).abs() < c) {
        return PrincipalDiagram::EMPTY;
    }
    let tb = (a1 + a2 + b).max(a2 + a3 + c).max(a3 + a4 + b).max(a4 + a1 + c);
    let td = (a1 + a3 + b + c).min(a2 + a4 + b + c);
    PrincipalDiagram { point: Some((tb, td)) }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corner {
    pub lambda: f64,
    pub support: usize,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerReport {
    pub corners: Vec<Corner>,
    pub estimated_betti: usize,
    /// Set when some corner's spread exceeds `2 · rel_tol · λ`, which hints
    /// at two cycles of nearly equal length.
    pub caveat: bool,
}

pub const DEFAULT_REL_TOL: f64 = 0.02;
pub const DEFAULT_MIN_SUPPORT: usize = 20;

/// Relative distance from the line `t_d = 2 t_b` within which a point
/// anchors a corner.
pub const APEX_BAND: f64 = 0.2;

/// Fenwick tree over 0/1 flags.
struct Counter(Vec<i64>);

impl Counter {
    fn new(n: usize) -> Self {
        let mut c = Counter(vec![0; n + 1]);
        for i in 0..n {
            c.add(i, 1);
        }
        c
    }

    fn add(&mut self, i: usize, v: i64) {
        let mut i = i + 1;
        while i < self.0.len() {
            self.0[i] += v;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over `0..end`.
    fn prefix(&self, end: usize) -> i64 {
        let mut i = end;
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i &= i - 1;
        }
        s
    }
}

/// Finds the corners `(λ/2, λ)` of the circle triangles that make up the
/// principal persistence set of an admissible metric graph.
///
/// A point `(t_b, t_d)` of the triangle of a cycle with diameter `λ`
/// satisfies `t_d ≤ λ ≤ t_b + t_d/2`, with equality on the right along the
/// triangle's left edge. Points within `APEX_BAND` of the line
/// `t_d = 2 t_b` have short intervals; stabbing those gives disjoint
/// anchor ranges, each holding at most one corner. The full sample is then
/// processed by increasing right end `s`: every remaining interval starting
/// at or before `s` supports a corner at `λ = s`. A candidate is accepted
/// when it falls in the current anchor range and has at least
/// `min_support` supporters, and then absorbs them; otherwise its own
/// interval is discarded. Corners within `rel_tol · λ` of each other are
/// merged.
pub fn detect_corners(sample: &PersistenceSetSample, rel_tol: f64, min_support: usize) -> Result<CornerReport> {
    detect_corners_with_band(sample, rel_tol, min_support, APEX_BAND)
}

pub fn detect_corners_with_band(
    sample: &PersistenceSetSample,
    rel_tol: f64,
    min_support: usize,
    band: f64,
) -> Result<CornerReport> {
    if (sample.n, sample.k) != (4, 1) {
        return Err(Error::NotPrincipal41 { n: sample.n, k: sample.k });
    }
    let pts = &sample.nontrivial_points;
    let anchors: Vec<(f64, f64)> = pts.iter().copied().filter(|&(tb, td)| (td - 2.0 * tb).abs() <= band * td).collect();
    let ranges: Vec<(f64, f64)> =
        stab(&anchors, 1, |_, s| Some(s)).into_iter().map(|(s, max_td)| (max_td, s)).collect();

    let mut next = 0;
    let mut corners: Vec<Corner> = Vec::new();
    for ((s, support), max_td) in stab(pts, min_support, |support, s| {
        while next < ranges.len() && ranges[next].1 < s {
            next += 1;
        }
        match ranges.get(next) {
            Some(&(lo, _)) if lo <= s => {
                next += 1;
                Some((s, support))
            }
            _ => None,
        }
    }) {
        match corners.last_mut() {
            Some(last) if s - last.lambda <= rel_tol * last.lambda => {
                last.support += support;
                last.spread = s.max(last.lambda + last.spread) - last.lambda;
            }
            _ => corners.push(Corner { lambda: s, support, spread: s - max_td }),
        }
    }
    let caveat = corners.iter().any(|c| c.spread > 2.0 * rel_tol * c.lambda);
    Ok(CornerReport { estimated_betti: corners.len(), corners, caveat })
}

/// Greedy stabbing of the intervals `[t_d, t_b + t_d/2]` by increasing
/// right end. `accept(support, s)` is asked about every candidate with at
/// least `min_support` alive intervals containing `s`; on `Some` those
/// intervals are removed and reported with their largest `t_d`, on `None`
/// only the candidate's own interval is removed.
fn stab<T>(pts: &[(f64, f64)], min_support: usize, mut accept: impl FnMut(usize, f64) -> Option<T>) -> Vec<(T, f64)> {
    let n = pts.len();
    let right = |i: usize| pts[i].0 + pts[i].1 / 2.0;
    let mut by_right: Vec<usize> = (0..n).collect();
    by_right.sort_by(|&i, &j| right(i).total_cmp(&right(j)).then(i.cmp(&j)));
    let mut by_left: Vec<usize> = (0..n).collect();
    by_left.sort_by(|&i, &j| pts[i].1.total_cmp(&pts[j].1).then(i.cmp(&j)));
    let mut rank = vec![0; n];
    for (r, &i) in by_left.iter().enumerate() {
        rank[i] = r;
    }
    let lefts: Vec<f64> = by_left.iter().map(|&i| pts[i].1).collect();

    let mut alive = vec![true; n];
    let mut counter = Counter::new(n);
    let mut cleared = 0;
    let mut out = Vec::new();
    for &i in &by_right {
        if !alive[i] {
            continue;
        }
        let s = right(i);
        let end = lefts.partition_point(|&l| l <= s);
        let support = counter.prefix(end) as usize;
        let taken = if support >= min_support { accept(support, s) } else { None };
        match taken {
            Some(t) => {
                let mut max_td = f64::NEG_INFINITY;
                for &j in &by_left[cleared..end] {
                    if alive[j] {
                        alive[j] = false;
                        counter.add(rank[j], -1);
                        max_td = max_td.max(pts[j].1);
                    }
                }
                cleared = end;
                out.push((t, max_td));
            }
            None => {
                alive[i] = false;
                counter.add(rank[i], -1);
            }
        }
    }
    out
}
