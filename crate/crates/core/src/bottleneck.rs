//! Bottleneck distance between small diagrams, Hausdorff distance between
//! sets of diagrams, and the Gromov-Hausdorff lower bound derived from it.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::Diagram;
use crate::principal::PrincipalDiagram;

/// Largest combined diagram size accepted by the exact matcher.
pub const MAX_MATCHING: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchingCost {
    pub value: f64,
    /// `(i, j)`: point `i` of the first diagram matched to point `j` of the second.
    pub matched_pairs: Vec<(usize, usize)>,
    /// Points sent to the diagonal, per side.
    pub unmatched: (Vec<usize>, Vec<usize>),
}

#[inline]
fn linf(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).abs().max((p.1 - q.1).abs())
}

#[inline]
fn half_pers(p: (f64, f64)) -> f64 {
    (p.1 - p.0) / 2.0
}

/// Bottleneck distance between diagrams with at most one point each.
#[inline]
pub fn one_point_bottleneck(p: Option<(f64, f64)>, q: Option<(f64, f64)>) -> f64 {
    match (p, q) {
        (None, None) => 0.0,
        (Some(p), None) | (None, Some(p)) => half_pers(p),
        (Some(p), Some(q)) => linf(p, q).min(half_pers(p).max(half_pers(q))),
    }
}

fn check(d: &Diagram) -> Result<()> {
    if d.points.iter().any(|p| !p.1.is_finite() || !p.0.is_finite()) {
        return Err(Error::InfiniteDeath);
    }
    Ok(())
}

/// Left vertices: points of `a`, then diagonal copies of `b`.
/// Right vertices: points of `b`, then diagonal copies of `a`.
struct Bipartite<'a> {
    a: &'a [(f64, f64)],
    b: &'a [(f64, f64)],
}

impl Bipartite<'_> {
    fn size(&self) -> usize {
        self.a.len() + self.b.len()
    }

    fn cost(&self, l: usize, r: usize) -> f64 {
        let (p, q) = (self.a.len(), self.b.len());
        match (l < p, r < q) {
            (true, true) => linf(self.a[l], self.b[r]),
            (true, false) => {
                if r - q == l {
                    half_pers(self.a[l])
                } else {
                    f64::INFINITY
                }
            }
            (false, true) => {
                if l - p == r {
                    half_pers(self.b[r])
                } else {
                    f64::INFINITY
                }
            }
            (false, false) => 0.0,
        }
    }

    /// Perfect matching using only edges of cost ≤ `t`: `match_of_right[r] = l`.
    fn perfect_matching(&self, t: f64) -> Option<Vec<usize>> {
        let n = self.size();
        let mut match_r: Vec<Option<usize>> = vec![None; n];
        for l in 0..n {
            let mut seen = vec![false; n];
            if !self.augment(l, t, &mut seen, &mut match_r) {
                return None;
            }
        }
        Some(match_r.into_iter().map(|m| m.expect("perfect")).collect())
    }

    fn augment(&self, l: usize, t: f64, seen: &mut [bool], match_r: &mut [Option<usize>]) -> bool {
        for r in 0..self.size() {
            if seen[r] || self.cost(l, r) > t {
                continue;
            }
            seen[r] = true;
            if match_r[r].is_none_or(|other| self.augment(other, t, seen, match_r)) {
                match_r[r] = Some(l);
                return true;
            }
        }
        false
    }
}

/// Exact bottleneck matching for diagrams of any size up to the limit,
/// by binary search over candidate costs.
pub fn bottleneck_matching(d1: &Diagram, d2: &Diagram) -> Result<MatchingCost> {
    check(d1)?;
    check(d2)?;
    if d1.len() + d2.len() > MAX_MATCHING {
        return Err(Error::TooLarge(format!(
            "{} diagram points exceed the matching limit of {MAX_MATCHING}",
            d1.len() + d2.len()
        )));
    }
    let g = Bipartite { a: &d1.points, b: &d2.points };
    let mut candidates = vec![0.0];
    for &p in g.a {
        candidates.push(half_pers(p));
        for &q in g.b {
            candidates.push(linf(p, q));
        }
    }
    candidates.extend(g.b.iter().map(|&q| half_pers(q)));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    // The largest candidate is always feasible: match everything to the diagonal.
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if g.perfect_matching(candidates[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let value = candidates[lo];
    let match_r = g.perfect_matching(value).expect("feasible at the optimum");
    let (p, q) = (d1.len(), d2.len());
    let mut matched_pairs = Vec::new();
    let mut unmatched_a = Vec::new();
    let mut unmatched_b = Vec::new();
    for (r, &l) in match_r.iter().enumerate() {
        match (l < p, r < q) {
            (true, true) => matched_pairs.push((l, r)),
            (true, false) => unmatched_a.push(l),
            (false, true) => unmatched_b.push(r),
            (false, false) => {}
        }
    }
    matched_pairs.sort_unstable();
    unmatched_a.sort_unstable();
    Ok(MatchingCost { value, matched_pairs, unmatched: (unmatched_a, unmatched_b) })
}

/// Bottleneck distance; diagrams with at most one point use the closed form.
pub fn bottleneck(d1: &Diagram, d2: &Diagram) -> Result<MatchingCost> {
    if d1.len() <= 1 && d2.len() <= 1 {
        check(d1)?;
        check(d2)?;
        let (p, q) = (d1.points.first().copied(), d2.points.first().copied());
        let value = one_point_bottleneck(p, q);
        let mut m = MatchingCost { value, matched_pairs: vec![], unmatched: (vec![], vec![]) };
        match (p, q) {
            (Some(a), Some(b)) if linf(a, b) <= half_pers(a).max(half_pers(b)) => m.matched_pairs.push((0, 0)),
            _ => m.unmatched = (if p.is_some() { vec![0] } else { vec![] }, if q.is_some() { vec![0] } else { vec![] }),
        }
        return Ok(m);
    }
    bottleneck_matching(d1, d2)
}

pub fn bottleneck_distance(d1: &Diagram, d2: &Diagram) -> Result<f64> {
    Ok(bottleneck(d1, d2)?.value)
}

/// Directed Hausdorff distance `max_{a∈A} min_{b∈B} d_B(a, b)` for
/// principal diagrams.
///
/// `B` is sorted by birth so each inner scan can stop once the birth gap
/// exceeds the best cost found, provided that cost is already at most half
/// the persistence of `a` (every cost is at least the smaller of the two).
fn directed_principal(a: &[PrincipalDiagram], b: &[PrincipalDiagram]) -> f64 {
    let has_empty = b.iter().any(|d| d.is_empty());
    let mut pts: Vec<(f64, f64)> = b.iter().filter_map(|d| d.point).collect();
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let births: Vec<f64> = pts.iter().map(|p| p.0).collect();
    a.par_iter()
        .map(|d| {
            let Some(p) = d.point else {
                // empty vs B
                return if has_empty { 0.0 } else { pts.iter().map(|&q| half_pers(q)).fold(f64::INFINITY, f64::min) };
            };
            let mut best = if has_empty { half_pers(p) } else { f64::INFINITY };
            let start = births.partition_point(|&x| x < p.0);
            let hp = half_pers(p);
            // walk right, then left, from the insertion point
            for &q in &pts[start..] {
                if q.0 - p.0 >= best && best <= hp {
                    break;
                }
                best = best.min(linf(p, q).min(hp.max(half_pers(q))));
            }
            for &q in pts[..start].iter().rev() {
                if p.0 - q.0 >= best && best <= hp {
                    break;
                }
                best = best.min(linf(p, q).min(hp.max(half_pers(q))));
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// Hausdorff distance between two sets of principal diagrams under the
/// bottleneck distance.
pub fn principal_hausdorff(a: &[PrincipalDiagram], b: &[PrincipalDiagram]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let finite = |d: &PrincipalDiagram| d.point.is_none_or(|p| p.0.is_finite() && p.1.is_finite());
    if !a.iter().chain(b).all(finite) {
        return Err(Error::InfiniteDeath);
    }
    Ok(directed_principal(a, b).max(directed_principal(b, a)))
}

/// Hausdorff distance between two finite sets of diagrams under the
/// bottleneck distance. The empty diagram is a legal element.
pub fn hausdorff_bottleneck(a: &[Diagram], b: &[Diagram]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    if a.iter().chain(b).all(|d| d.len() <= 1) {
        let conv = |s: &[Diagram]| -> Vec<PrincipalDiagram> {
            s.iter().map(|d| PrincipalDiagram { point: d.points.first().copied() }).collect()
        };
        return principal_hausdorff(&conv(a), &conv(b));
    }
    let directed = |x: &[Diagram], y: &[Diagram]| -> Result<f64> {
        x.par_iter()
            .map(|d| {
                let mut best = f64::INFINITY;
                for e in y {
                    best = best.min(bottleneck_distance(d, e)?);
                }
                Ok(best)
            })
            .try_reduce(|| 0.0, |u, v| Ok(u.max(v)))
    };
    Ok(directed(a, b)?.max(directed(b, a)?))
}

/// Half the Hausdorff-bottleneck distance: a lower bound for the
/// Gromov-Hausdorff distance between the source spaces (VR diagrams are
/// 2-Lipschitz in the Gromov-Hausdorff distance).
pub fn gh_lower_bound(a: &[Diagram], b: &[Diagram]) -> Result<f64> {
    Ok(hausdorff_bottleneck(a, b)? / 2.0)
}

/// Lower bound for `d_GH(S¹, S^k)` from the regular cross-polytope in
/// `S^k`, whose degree-k diagram `(π/2, π)` sits at bottleneck distance
/// `min(π/4, (k−1)π/(2(k+1)))` from the circle's principal persistence set.
pub fn cross_polytope_bound(k: usize) -> f64 {
    use std::f64::consts::PI;
    let k = k as f64;
    (PI / 4.0).min((k - 1.0) * PI / (2.0 * (k + 1.0))) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dg(points: &[(f64, f64)]) -> Diagram {
        Diagram::new(1, points.to_vec())
    }

    #[test]
    fn identical_and_empty() {
        let d = dg(&[(0.0, 1.0), (0.5, 2.0)]);
        assert_eq!(bottleneck_distance(&d, &d).unwrap(), 0.0);
        assert!((bottleneck_distance(&dg(&[(1.0, 1.6)]), &dg(&[])).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(bottleneck_distance(&dg(&[]), &dg(&[])).unwrap(), 0.0);
    }

    #[test]
    fn two_point_matching() {
        // the long bars match each other; the short one goes to the diagonal
        let a = dg(&[(0.0, 10.0), (5.0, 5.2)]);
        let b = dg(&[(0.5, 10.0)]);
        let m = bottleneck(&a, &b).unwrap();
        assert!((m.value - 0.5).abs() < 1e-15);
        assert_eq!(m.matched_pairs, vec![(0, 0)]);
        assert_eq!(m.unmatched, (vec![1], vec![]));
    }

    #[test]
    fn closed_form_agrees_with_matcher() {
        let a = dg(&[(1.0, 2.0)]);
        for b in [dg(&[(1.1, 2.3)]), dg(&[(3.0, 3.5)]), dg(&[])] {
            assert_eq!(bottleneck(&a, &b).unwrap().value, bottleneck_matching(&a, &b).unwrap().value);
        }
    }

    #[test]
    fn rejects_infinite_and_large() {
        let inf = dg(&[(0.0, f64::INFINITY)]);
        assert_eq!(bottleneck(&inf, &dg(&[])), Err(Error::InfiniteDeath));
        let big = dg(&vec![(0.0, 1.0); 40]);
        assert!(matches!(bottleneck(&big, &big), Err(Error::TooLarge(_))));
    }

    #[test]
    fn hausdorff_examples() {
        let e = vec![dg(&[])];
        let one = vec![dg(&[(1.0, 1.8)])];
        assert_eq!(hausdorff_bottleneck(&e, &one).unwrap(), 0.4);
        assert_eq!(hausdorff_bottleneck(&one, &one).unwrap(), 0.0);
        assert_eq!(gh_lower_bound(&one, &one).unwrap(), 0.0);
        assert_eq!(hausdorff_bottleneck(&[], &one), Err(Error::EmptyInput));
        let multi = vec![dg(&[(0.0, 1.0), (2.0, 2.4)]), dg(&[])];
        assert!((hausdorff_bottleneck(&multi, &e).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pruned_scan_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut gen = |n: usize| -> Vec<PrincipalDiagram> {
            (0..n)
                .map(|_| {
                    let b: f64 = rng.random_range(0.0..3.0);
                    PrincipalDiagram { point: Some((b, b + rng.random_range(0.0..1.0))) }
                })
                .collect()
        };
        let (a, mut b) = (gen(300), gen(200));
        let brute = |x: &[PrincipalDiagram], y: &[PrincipalDiagram]| {
            x.iter()
                .map(|p| y.iter().map(|q| one_point_bottleneck(p.point, q.point)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        let expect = brute(&a, &b).max(brute(&b, &a));
        assert_eq!(principal_hausdorff(&a, &b).unwrap(), expect);
        b.push(PrincipalDiagram::EMPTY);
        let expect = brute(&a, &b).max(brute(&b, &a));
        assert_eq!(principal_hausdorff(&a, &b).unwrap(), expect);
    }

    #[test]
    fn cross_polytope_closed_form() {
        use std::f64::consts::PI;
        assert_eq!(cross_polytope_bound(3), PI / 8.0);
        assert_eq!(cross_polytope_bound(5), PI / 8.0);
        assert!((cross_polytope_bound(2) - PI / 12.0).abs() < 1e-15);
    }
}
