//! Degree-k Vietoris-Rips persistence of a space with exactly `2k + 2`
//! points, read off the two largest distances in each row.
//!
//! With `t_b(x)` and `t_d(x)` the second largest and largest distance from
//! `x`, the diagram is the single point `(max t_b(x), min t_d(x))` when that
//! pair is strictly increasing, and empty otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;

/// The diagram of a principal configuration: empty or one point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PrincipalDiagram {
    pub point: Option<(f64, f64)>,
}

impl PrincipalDiagram {
    pub const EMPTY: PrincipalDiagram = PrincipalDiagram { point: None };

    pub fn is_empty(&self) -> bool {
        self.point.is_none()
    }

    pub fn persistence(&self) -> f64 {
        self.point.map_or(0.0, |(b, d)| d - b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremes {
    pub tb: f64,
    pub td: f64,
    /// Index of the unique farthest point, if there is one.
    pub vd: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointExtremes {
    pub per_point: Vec<Extremes>,
}

impl PointExtremes {
    pub fn tb(&self) -> f64 {
        self.per_point.iter().map(|e| e.tb).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn td(&self) -> f64 {
        self.per_point.iter().map(|e| e.td).fold(f64::INFINITY, f64::min)
    }

    /// `Some` only if every point has a unique farthest point.
    pub fn vd_map(&self) -> Option<Vec<usize>> {
        self.per_point.iter().map(|e| e.vd).collect()
    }
}

#[inline]
fn row_extremes(row: &[f64], i: usize) -> Extremes {
    let (mut td, mut tb) = (f64::NEG_INFINITY, 0.0f64);
    let mut vd = None;
    let mut tied = false;
    let mut first = true;
    for (j, &x) in row.iter().enumerate() {
        if j == i {
            continue;
        }
        if first {
            td = x;
            vd = Some(j);
            first = false;
        } else if x > td {
            tb = td;
            td = x;
            vd = Some(j);
            tied = false;
        } else if x == td {
            tb = td;
            tied = true;
        } else if x > tb {
            tb = x;
        }
    }
    Extremes { tb, td, vd: if tied { None } else { vd } }
}

/// Per-row `(t_b, t_d, v_d)`. For `n = 2` the second largest distance is
/// the zero self-distance.
pub fn point_extremes(m: &DistanceMatrix) -> Result<PointExtremes> {
    let n = m.size();
    if n < 2 {
        return Err(Error::TooFewPoints { required: 2, got: n });
    }
    Ok(PointExtremes { per_point: m.rows().enumerate().map(|(i, r)| row_extremes(r, i)).collect() })
}

/// Flat-buffer core used by the sampling engine; `d` is row-major `n × n`.
#[inline]
pub fn principal_point(d: &[f64], n: usize) -> Option<(f64, f64)> {
    let mut tb = f64::NEG_INFINITY;
    let mut td = f64::INFINITY;
    for i in 0..n {
        let e = row_extremes(&d[i * n..(i + 1) * n], i);
        tb = tb.max(e.tb);
        td = td.min(e.td);
    }
    (tb < td).then_some((tb, td))
}

/// The degree-k diagram of a `2k + 2` point space.
pub fn principal_diagram(m: &DistanceMatrix, k: usize) -> Result<PrincipalDiagram> {
    let expected = 2 * k + 2;
    if m.size() != expected {
        return Err(Error::SizeMismatch { expected, got: m.size() });
    }
    Ok(PrincipalDiagram { point: principal_point(m.as_slice(), expected) })
}

/// Degree k homology of an n-point VR filtration vanishes when `k > n/2 − 1`.
pub fn vanishes_below_principal(n: usize, k: usize) -> bool {
    2 * k + 2 > n
}

/// Maximum over the three pairings of the four points of
/// (product of diagonals − sum of products of opposite sides).
/// Nonpositive exactly when the Ptolemaic inequality holds for this tuple.
pub fn ptolemy_slack(m: &DistanceMatrix) -> Result<f64> {
    if m.size() != 4 {
        return Err(Error::SizeMismatch { expected: 4, got: m.size() });
    }
    let d = |i, j| m.get(i, j);
    // diagonals (a,c),(b,d); sides (a,b),(c,d) and (b,c),(d,a)
    let slack = |a, b, c, e| d(a, c) * d(b, e) - (d(a, b) * d(c, e) + d(b, c) * d(e, a));
    Ok(slack(0, 1, 2, 3).max(slack(0, 2, 1, 3)).max(slack(0, 1, 3, 2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(angles: &[f64]) -> DistanceMatrix {
        let n = angles.len();
        let d = (0..n * n).map(|ij| crate::spaces::circle_distance(angles[ij / n], angles[ij % n])).collect();
        DistanceMatrix::from_flat(n, d).unwrap()
    }

    #[test]
    fn square_on_circle() {
        let m = circle(&[0.0, PI / 2.0, PI, 3.0 * PI / 2.0]);
        let e = point_extremes(&m).unwrap();
        for (i, x) in e.per_point.iter().enumerate() {
            assert_eq!((x.tb, x.td, x.vd), (PI / 2.0, PI, Some((i + 2) % 4)));
        }
        assert_eq!(principal_diagram(&m, 1).unwrap().point, Some((PI / 2.0, PI)));
    }

    #[test]
    fn second_example_configuration() {
        // d12,d23,d34 < d24 < d41 < d13, indices shifted down by one
        let rows = vec![
            vec![0.0, 1.5, 2.8, 2.5],
            vec![1.5, 0.0, 1.5, 2.0],
            vec![2.8, 1.5, 0.0, 1.5],
            vec![2.5, 2.0, 1.5, 0.0],
        ];
        let m = DistanceMatrix::validate(&rows).unwrap();
        let e = point_extremes(&m).unwrap();
        assert_eq!((e.per_point[3].tb, e.per_point[3].td, e.per_point[3].vd), (2.0, 2.5, Some(0)));
        assert!(principal_diagram(&m, 1).unwrap().is_empty());
    }

    #[test]
    fn two_points() {
        let m = DistanceMatrix::validate(&[vec![0.0, 1.5], vec![1.5, 0.0]]).unwrap();
        let e = point_extremes(&m).unwrap();
        assert!(e.per_point.iter().all(|x| x.tb == 0.0 && x.td == 1.5));
        assert_eq!(principal_diagram(&m, 0).unwrap().point, Some((0.0, 1.5)));
    }

    #[test]
    fn collinear_and_degenerate() {
        let xs = [0.0, 1.0, 2.5, 4.0];
        let rows: Vec<Vec<f64>> = xs.iter().map(|a| xs.iter().map(|b| f64::abs(a - b)).collect()).collect();
        let m = DistanceMatrix::validate(&rows).unwrap();
        assert!(principal_diagram(&m, 1).unwrap().is_empty());

        // angles 0, 2π/3, 4π/3, 0 written out exactly
        let t = 2.0 * PI / 3.0;
        let m = DistanceMatrix::validate(&[
            vec![0.0, t, t, 0.0],
            vec![t, 0.0, t, t],
            vec![t, t, 0.0, t],
            vec![0.0, t, t, 0.0],
        ])
        .unwrap();
        assert!(principal_diagram(&circle(&[0.0, t, 2.0 * t, 0.0]), 1).unwrap().is_empty());
        let e = point_extremes(&m).unwrap();
        assert_eq!((e.tb(), e.td()), (t, t));
        assert!(principal_diagram(&m, 1).unwrap().is_empty());
    }

    #[test]
    fn errors() {
        let m = DistanceMatrix::validate(&[vec![0.0]]).unwrap();
        assert_eq!(point_extremes(&m), Err(Error::TooFewPoints { required: 2, got: 1 }));
        let m = circle(&[0.0, 1.0, 2.0]);
        assert_eq!(principal_diagram(&m, 1), Err(Error::SizeMismatch { expected: 4, got: 3 }));
        assert!(ptolemy_slack(&m).is_err());
        assert!(vanishes_below_principal(3, 1) && !vanishes_below_principal(4, 1));
    }

    #[test]
    fn ptolemy() {
        let s = 2f64.sqrt();
        let sq = DistanceMatrix::validate(&[
            vec![0.0, 1.0, s, 1.0],
            vec![1.0, 0.0, 1.0, s],
            vec![s, 1.0, 0.0, 1.0],
            vec![1.0, s, 1.0, 0.0],
        ])
        .unwrap();
        assert!(ptolemy_slack(&sq).unwrap().abs() < 1e-15);
        let m = circle(&[0.0, PI / 2.0, PI, 3.0 * PI / 2.0]);
        assert!((ptolemy_slack(&m).unwrap() - PI * PI / 2.0).abs() < 1e-12);
    }
}
