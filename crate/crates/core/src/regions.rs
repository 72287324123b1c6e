//! Closed-form descriptions of principal persistence sets in the
//! `(t_b, t_d)` plane: membership, boundary polylines, interior grids,
//! and the density of the circle's persistence measure.
//!
//! Every region is treated as closed; `contains` adds the slack `tol` to
//! each defining inequality.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::principal::PrincipalDiagram;
use crate::spaces::{param_f64, parse_descriptor};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionSpec {
    /// Circle with diameter `lambda`, odd k: `(k+1)(λ − t_b) ≤ t_d ≤ λ`.
    CircleOddK { k: usize, lambda: f64 },
    /// Circle with diameter `lambda`, even k: `kλ/(k+1) ≤ t_b ≤ t_d ≤ λ`.
    CircleEvenK { k: usize, lambda: f64 },
    /// Four-point sets of the model surface of curvature `kappa`. For
    /// `kappa ≤ 0` the region is unbounded and `cap` bounds `t_d` for
    /// boundary and grid generation only.
    ModelSurface { kappa: f64, cap: f64 },
    /// Unit circle with the chordal metric.
    EuclideanCircle,
    /// Unit sphere `S^m` with the chordal metric, `m ≥ 2`.
    EuclideanSphereM { m: usize },
    /// `t_b ≤ t_d ≤ min(√2 t_b, cap)`, valid for any Ptolemaic space of
    /// diameter at most `cap`.
    PtolemaicEnvelope { cap: f64 },
}

/// `(kλ/(k+1), λ)`: the diagram of `2k + 2` equally spaced points on a
/// circle of diameter `λ`.
pub fn corner_point(k: usize, lambda: f64) -> (f64, f64) {
    (k as f64 / (k as f64 + 1.0) * lambda, lambda)
}

/// Density of the degree-1 persistence measure of four uniform points on
/// the geodesic unit circle; integrates to 1/9.
pub fn circle_density(tb: f64, td: f64) -> f64 {
    if RegionSpec::circle().contains(tb, td, 0.0) {
        12.0 / (PI * PI * PI) * (PI - td)
    } else {
        0.0
    }
}

fn default_cap(kappa: f64) -> f64 {
    if kappa < 0.0 {
        4.0 / (-kappa).sqrt()
    } else if kappa == 0.0 {
        4.0
    } else {
        PI / kappa.sqrt()
    }
}

/// Evenly spaced points from `a` towards `b` at spacing at most `step`,
/// excluding `b`.
fn segment(out: &mut Vec<(f64, f64)>, a: (f64, f64), b: (f64, f64), step: f64) {
    let len = (b.0 - a.0).hypot(b.1 - a.1);
    let pieces = (len / step).ceil().max(1.0) as usize;
    for i in 0..pieces {
        let t = i as f64 / pieces as f64;
        out.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
    }
}

/// Points `(f(t_d), t_d)` for `t_d` from `d0` towards `d1`, excluding `d1`.
fn curve(out: &mut Vec<(f64, f64)>, f: impl Fn(f64) -> f64, d0: f64, d1: f64, step: f64) {
    let pieces = ((d1 - d0).abs() / step).ceil().max(1.0) as usize;
    for i in 0..pieces {
        let td = d0 + (d1 - d0) * i as f64 / pieces as f64;
        out.push((f(td), td));
    }
}

impl RegionSpec {
    /// The principal persistence set of four points on the geodesic unit circle.
    pub fn circle() -> Self {
        RegionSpec::CircleOddK { k: 1, lambda: PI }
    }

    pub fn circle_k(k: usize, lambda: f64) -> Self {
        if k % 2 == 1 {
            RegionSpec::CircleOddK { k, lambda }
        } else {
            RegionSpec::CircleEvenK { k, lambda }
        }
    }

    pub fn model_surface(kappa: f64) -> Self {
        RegionSpec::ModelSurface { kappa, cap: default_cap(kappa) }
    }

    pub fn contains(&self, tb: f64, td: f64, tol: f64) -> bool {
        if !(tb >= -tol && tb <= td + tol) {
            return false;
        }
        match *self {
            RegionSpec::CircleOddK { k, lambda } => (k as f64 + 1.0) * (lambda - tb) <= td + tol && td <= lambda + tol,
            RegionSpec::CircleEvenK { k, lambda } => {
                k as f64 / (k as f64 + 1.0) * lambda <= tb + tol && td <= lambda + tol
            }
            RegionSpec::ModelSurface { kappa, .. } => {
                if kappa > 0.0 {
                    let s = kappa.sqrt();
                    td <= PI / s + tol && (s * td / 2.0).sin() <= SQRT_2 * (s * tb / 2.0).sin() + tol
                } else if kappa == 0.0 {
                    td <= SQRT_2 * tb + tol
                } else {
                    let s = (-kappa).sqrt();
                    (s * td / 2.0).sinh() <= SQRT_2 * (s * tb / 2.0).sinh() + tol
                }
            }
            RegionSpec::EuclideanCircle => {
                2.0 * tb * (1.0 - tb * tb / 4.0).max(0.0).sqrt() <= td + tol && SQRT_2 <= tb + tol && td <= 2.0 + tol
            }
            RegionSpec::EuclideanSphereM { .. } => td <= SQRT_2 * tb + tol && td <= 2.0 + tol,
            RegionSpec::PtolemaicEnvelope { cap } => td <= SQRT_2 * tb + tol && td <= cap + tol,
        }
    }

    /// Bounding box `((b0, b1), (d0, d1))` used for grids.
    pub fn bounding_box(&self) -> ((f64, f64), (f64, f64)) {
        match *self {
            RegionSpec::CircleOddK { k, lambda } => {
                let lo = corner_point(k, lambda).0;
                ((lo, lambda), ((k as f64 + 1.0) / (k as f64 + 2.0) * lambda, lambda))
            }
            RegionSpec::CircleEvenK { k, lambda } => {
                let lo = corner_point(k, lambda).0;
                ((lo, lambda), (lo, lambda))
            }
            RegionSpec::ModelSurface { cap, .. } => ((0.0, cap), (0.0, cap)),
            RegionSpec::EuclideanCircle => ((SQRT_2, 2.0), (3f64.sqrt(), 2.0)),
            RegionSpec::EuclideanSphereM { .. } => ((0.0, 2.0), (0.0, 2.0)),
            RegionSpec::PtolemaicEnvelope { cap } => {
                let cap = if cap.is_finite() { cap } else { 4.0 };
                ((0.0, cap), (0.0, cap))
            }
        }
    }

    /// A closed polyline around the region with spacing at most about `step`.
    /// Every corner of the region is included exactly.
    pub fn boundary_points(&self, step: f64) -> Vec<(f64, f64)> {
        assert!(step > 0.0, "step must be positive");
        let mut out = Vec::new();
        match *self {
            RegionSpec::CircleOddK { k, lambda } => {
                let a = corner_point(k, lambda);
                let m = (k as f64 + 1.0) / (k as f64 + 2.0) * lambda;
                segment(&mut out, a, (m, m), step);
                segment(&mut out, (m, m), (lambda, lambda), step);
                segment(&mut out, (lambda, lambda), a, step);
            }
            RegionSpec::CircleEvenK { k, lambda } => {
                let a = corner_point(k, lambda);
                segment(&mut out, (a.0, a.0), (lambda, lambda), step);
                segment(&mut out, (lambda, lambda), a, step);
                segment(&mut out, a, (a.0, a.0), step);
            }
            RegionSpec::ModelSurface { kappa, cap } => {
                let left = |td: f64| self.left_boundary(td).expect("model surface has a left boundary");
                let top = if kappa > 0.0 { cap.min(PI / kappa.sqrt()) } else { cap };
                curve(&mut out, left, 0.0, top, step);
                segment(&mut out, (left(top), top), (top, top), step);
                segment(&mut out, (top, top), (0.0, 0.0), step);
            }
            RegionSpec::EuclideanCircle => {
                let left = |td: f64| self.left_boundary(td).expect("euclidean circle has a left boundary");
                let r3 = 3f64.sqrt();
                curve(&mut out, left, 2.0, r3, step);
                segment(&mut out, (r3, r3), (2.0, 2.0), step);
                segment(&mut out, (2.0, 2.0), (SQRT_2, 2.0), step);
            }
            RegionSpec::EuclideanSphereM { .. } | RegionSpec::PtolemaicEnvelope { .. } => {
                let cap = self.bounding_box().1 .1;
                let a = (cap / SQRT_2, cap);
                segment(&mut out, (0.0, 0.0), a, step);
                segment(&mut out, a, (cap, cap), step);
                segment(&mut out, (cap, cap), (0.0, 0.0), step);
            }
        }
        out
    }

    /// Smallest `t_b` in the region at death `td`, for regions whose left
    /// edge is a curve or line through the origin side.
    pub fn left_boundary(&self, td: f64) -> Option<f64> {
        match *self {
            RegionSpec::CircleOddK { k, lambda } => Some(lambda - td / (k as f64 + 1.0)),
            RegionSpec::CircleEvenK { k, lambda } => Some(corner_point(k, lambda).0),
            RegionSpec::ModelSurface { kappa, .. } => Some(if kappa > 0.0 {
                let s = kappa.sqrt();
                2.0 / s * (FRAC_1_SQRT_2 * (s * td / 2.0).sin()).asin()
            } else if kappa == 0.0 {
                td / SQRT_2
            } else {
                let s = (-kappa).sqrt();
                2.0 / s * (FRAC_1_SQRT_2 * (s * td / 2.0).sinh()).asinh()
            }),
            RegionSpec::EuclideanCircle => {
                // invert t_d = 2 t_b √(1 − t_b²/4) on the branch t_b ≥ √2
                let x = (1.0 + (1.0 - td * td / 4.0).max(0.0).sqrt()) * 2.0;
                Some(x.sqrt())
            }
            RegionSpec::EuclideanSphereM { .. } | RegionSpec::PtolemaicEnvelope { .. } => Some(td / SQRT_2),
        }
    }

    /// Whether the point lies within `tol` of one of the boundary pieces.
    pub fn on_boundary(&self, tb: f64, td: f64, tol: f64) -> bool {
        if !self.contains(tb, td, tol) {
            return false;
        }
        let d1 = self.bounding_box().1 .1;
        let near = |x: f64, y: f64| (x - y).abs() <= tol;
        let left = self.left_boundary(td).is_some_and(|l| near(l, tb));
        let top = match *self {
            RegionSpec::ModelSurface { kappa, cap } if kappa > 0.0 => near(td, cap.min(PI / kappa.sqrt())),
            _ => near(td, d1),
        };
        left || top || near(tb, td)
    }

    /// Grid points of spacing `step` inside the region.
    pub fn interior_grid(&self, step: f64) -> Vec<(f64, f64)> {
        assert!(step > 0.0, "step must be positive");
        let ((b0, b1), (d0, d1)) = self.bounding_box();
        let nb = ((b1 - b0) / step).floor() as usize;
        let nd = ((d1 - d0) / step).floor() as usize;
        let mut out = Vec::new();
        for i in 0..=nb {
            let tb = b0 + i as f64 * step;
            for j in 0..=nd {
                let td = d0 + j as f64 * step;
                if self.contains(tb, td, 0.0) {
                    out.push((tb, td));
                }
            }
        }
        out
    }

    /// Boundary points at `boundary_step`, interior grid at `interior_step`,
    /// plus the empty diagram, as a diagram set.
    pub fn diagram_set(&self, boundary_step: f64, interior_step: f64) -> Vec<PrincipalDiagram> {
        let mut pts = self.boundary_points(boundary_step);
        pts.extend(self.interior_grid(interior_step));
        let mut set: Vec<PrincipalDiagram> =
            pts.into_iter().filter(|p| p.0 < p.1).map(|p| PrincipalDiagram { point: Some(p) }).collect();
        set.push(PrincipalDiagram::EMPTY);
        set
    }
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RegionSpec::CircleOddK { k, lambda } | RegionSpec::CircleEvenK { k, lambda } => {
                write!(f, "circle:k={k},lambda={lambda}")
            }
            RegionSpec::ModelSurface { kappa, cap } => write!(f, "mk:kappa={kappa},cap={cap}"),
            RegionSpec::EuclideanCircle => write!(f, "s1-e"),
            RegionSpec::EuclideanSphereM { m } => write!(f, "sphere-e:m={m}"),
            RegionSpec::PtolemaicEnvelope { cap } => write!(f, "ptolemaic:cap={cap}"),
        }
    }
}

impl FromStr for RegionSpec {
    type Err = Error;

    /// `s1`, `circle:k=2,lambda=3.14`, `s2-geodesic`, `r2`, `h2`,
    /// `mk:kappa=-1,cap=4`, `s1-e`, `sphere-e:m=2`, `ptolemaic:cap=2`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = parse_descriptor(s)?;
        let get = |key: &str| param_f64(&params, key);
        let region = match name.as_str() {
            "s1" => RegionSpec::circle(),
            "circle" => {
                let k = get("k")?.unwrap_or(1.0);
                if k < 0.0 || k.fract() != 0.0 {
                    return Err(Error::InvalidDescriptor(format!("{s}: k must be a nonnegative integer")));
                }
                RegionSpec::circle_k(k as usize, get("lambda")?.unwrap_or(PI))
            }
            "s2" | "s2-geodesic" => RegionSpec::model_surface(1.0),
            "r2" => RegionSpec::model_surface(0.0),
            "h2" => RegionSpec::model_surface(-1.0),
            "mk" => {
                let kappa = get("kappa")?.ok_or_else(|| Error::InvalidDescriptor(format!("{s}: missing kappa")))?;
                let cap = get("cap")?.unwrap_or(default_cap(kappa));
                RegionSpec::ModelSurface { kappa, cap }
            }
            "s1-e" => RegionSpec::EuclideanCircle,
            "sphere-e" | "s2-e" => {
                let m = get("m")?.unwrap_or(2.0);
                if m < 2.0 || m.fract() != 0.0 {
                    return Err(Error::InvalidDescriptor(format!("{s}: m must be an integer ≥ 2")));
                }
                RegionSpec::EuclideanSphereM { m: m as usize }
            }
            "ptolemaic" => RegionSpec::PtolemaicEnvelope { cap: get("cap")?.unwrap_or(f64::INFINITY) },
            _ => return Err(Error::InvalidDescriptor(format!("unknown region {s:?}"))),
        };
        if let RegionSpec::CircleOddK { lambda, .. } | RegionSpec::CircleEvenK { lambda, .. } = region {
            if !(lambda > 0.0) {
                return Err(Error::InvalidDescriptor(format!("{s}: lambda must be positive")));
            }
        }
        Ok(region)
    }
}
