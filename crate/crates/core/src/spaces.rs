//! Closed-form metric spaces with exact distances and uniform samplers.
//!
//! Points are stored as small coordinate vectors: an angle for circles, a
//! unit vector for spheres, an angle pair for the torus, an ambient `R³`
//! vector on the quadric for the constant-curvature surfaces, and a vector of
//! norm at most `R` for Euclidean disks.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;

const ON_MODEL_TOL: f64 = 1e-12;

/// Anything that can be sampled uniformly and measured.
///
/// The persistence-set engine is generic over this trait so model spaces,
/// metric graphs and finite mm-spaces share one code path.
pub trait Space: Sync {
    type Point: Clone + Send + Sync;

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Point;

    /// Distance between two points produced by [`Space::draw`].
    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64;

    /// Short descriptor recorded in sample sidecars.
    fn describe(&self) -> String;

    /// Whether the coordinates are angles (controls plot ticks).
    fn is_angular(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceModel {
    /// Geodesic circle of diameter `lambda` (circumference `2 * lambda`).
    CircleGeodesic {
        lambda: f64,
    },
    /// Unit sphere `S^m ⊂ R^{m+1}` with the great-circle distance.
    SphereGeodesic {
        m: usize,
    },
    /// Unit sphere `S^m ⊂ R^{m+1}` with the chordal distance.
    SphereEuclidean {
        m: usize,
    },
    /// Product of two unit geodesic circles with the ℓ² product metric.
    TorusL2,
    /// Constant curvature surface. For `kappa < 0` points are drawn from a
    /// geodesic disk of radius `disk_radius`.
    ModelSurface {
        kappa: f64,
        disk_radius: f64,
    },
    EuclideanDisk {
        m: usize,
        radius: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpacePoint(pub SmallVec<[f64; 4]>);

impl SpacePoint {
    pub fn new(coords: &[f64]) -> Self {
        SpacePoint(SmallVec::from_slice(coords))
    }

    pub fn angle(theta: f64) -> Self {
        Self::new(&[theta])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn chord(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Angle between unit vectors, accurate near 0 and near π.
fn unit_angle(a: &[f64], b: &[f64]) -> f64 {
    if dot(a, b) >= 0.0 {
        2.0 * (chord(a, b) / 2.0).clamp(-1.0, 1.0).asin()
    } else {
        let sum = a.iter().zip(b).map(|(x, y)| (x + y) * (x + y)).sum::<f64>().sqrt();
        PI - 2.0 * (sum / 2.0).clamp(-1.0, 1.0).asin()
    }
}

/// Geodesic distance on the circle `[0, 2π) / 0 ~ 2π`.
#[inline]
pub fn circle_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).abs().rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn gaussian_unit<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> SmallVec<[f64; 4]> {
    loop {
        let v: SmallVec<[f64; 4]> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let r = norm(&v);
        if r > 1e-300 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

impl SpaceModel {
    pub fn circle() -> Self {
        SpaceModel::CircleGeodesic { lambda: PI }
    }

    /// Default geodesic disk radius `π / √|κ|`.
    pub fn model_surface(kappa: f64) -> Self {
        SpaceModel::ModelSurface { kappa, disk_radius: PI / kappa.abs().sqrt() }
    }

    fn ambient_dim(&self) -> usize {
        match *self {
            SpaceModel::CircleGeodesic { .. } => 1,
            SpaceModel::SphereGeodesic { m } | SpaceModel::SphereEuclidean { m } => m + 1,
            SpaceModel::TorusL2 => 2,
            SpaceModel::ModelSurface { .. } => 3,
            SpaceModel::EuclideanDisk { m, .. } => m,
        }
    }

    /// Checks that the model parameters are admissible.
    pub fn check(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidDescriptor(format!("{self}: {msg}")));
        match *self {
            SpaceModel::CircleGeodesic { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
                bad("lambda must be positive")
            }
            SpaceModel::SphereGeodesic { m } | SpaceModel::SphereEuclidean { m } if m == 0 => {
                bad("dimension must be at least 1")
            }
            SpaceModel::ModelSurface { kappa, disk_radius } => {
                if kappa == 0.0 || !kappa.is_finite() {
                    bad("kappa must be nonzero; use disk:m=2 for the flat plane")
                } else if kappa < 0.0 && !(disk_radius > 0.0 && disk_radius.is_finite()) {
                    bad("disk radius must be positive")
                } else {
                    Ok(())
                }
            }
            SpaceModel::EuclideanDisk { m, radius } if m == 0 || !(radius > 0.0) => {
                bad("dimension and radius must be positive")
            }
            _ => Ok(()),
        }
    }

    /// Verifies that `p` lies on the model.
    pub fn check_point(&self, p: &SpacePoint) -> Result<()> {
        let c = p.coords();
        let fail = |why: String| Err(Error::PointNotOnModel(format!("{self}: {why}")));
        if c.len() != self.ambient_dim() {
            return fail(format!("expected {} coordinates, got {}", self.ambient_dim(), c.len()));
        }
        if c.iter().any(|x| !x.is_finite()) {
            return fail("non-finite coordinate".into());
        }
        match *self {
            SpaceModel::CircleGeodesic { .. } | SpaceModel::TorusL2 => Ok(()),
            SpaceModel::SphereGeodesic { .. } | SpaceModel::SphereEuclidean { .. } => {
                let r = norm(c);
                if (r - 1.0).abs() > ON_MODEL_TOL {
                    fail(format!("norm {r} is not 1"))
                } else {
                    Ok(())
                }
            }
            SpaceModel::ModelSurface { kappa, .. } => {
                let target = 1.0 / kappa;
                let q = if kappa > 0.0 { dot(c, c) } else { -c[0] * c[0] + c[1] * c[1] + c[2] * c[2] };
                let scale = target.abs().max(dot(c, c));
                if (q - target).abs() > ON_MODEL_TOL * scale {
                    fail(format!("quadric value {q}, expected {target}"))
                } else if kappa < 0.0 && c[0] <= 0.0 {
                    fail("hyperboloid point must have x1 > 0".into())
                } else {
                    Ok(())
                }
            }
            SpaceModel::EuclideanDisk { radius, .. } => {
                let r = norm(c);
                if r > radius * (1.0 + ON_MODEL_TOL) {
                    fail(format!("norm {r} exceeds radius {radius}"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Exact distance between two valid points.
    pub fn distance(&self, p: &SpacePoint, q: &SpacePoint) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.distance_unchecked(p, q))
    }

    #[inline]
    pub(crate) fn distance_unchecked(&self, p: &SpacePoint, q: &SpacePoint) -> f64 {
        let (a, b) = (p.coords(), q.coords());
        match *self {
            SpaceModel::CircleGeodesic { lambda } => lambda / PI * circle_distance(a[0], b[0]),
            SpaceModel::SphereGeodesic { .. } => unit_angle(a, b),
            SpaceModel::SphereEuclidean { .. } | SpaceModel::EuclideanDisk { .. } => chord(a, b),
            SpaceModel::TorusL2 => circle_distance(a[0], b[0]).hypot(circle_distance(a[1], b[1])),
            SpaceModel::ModelSurface { kappa, .. } if kappa > 0.0 => {
                let s = kappa.sqrt();
                let ua: SmallVec<[f64; 4]> = a.iter().map(|x| x * s).collect();
                let ub: SmallVec<[f64; 4]> = b.iter().map(|x| x * s).collect();
                unit_angle(&ua, &ub) / s
            }
            SpaceModel::ModelSurface { kappa, .. } => {
                // ⟨y−z|y−z⟩ = 4 sinh²(d/2) on the unit hyperboloid.
                let s = (-kappa).sqrt();
                let d: SmallVec<[f64; 4]> = a.iter().zip(b).map(|(x, y)| (x - y) * s).collect();
                let q = (-d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).max(0.0);
                2.0 * (q.sqrt() / 2.0).asinh() / s
            }
        }
    }

    /// `count` independent uniform draws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<SpacePoint> {
        (0..count).map(|_| self.draw_point(rng)).collect()
    }

    pub fn draw_point<R: Rng + ?Sized>(&self, rng: &mut R) -> SpacePoint {
        match *self {
            SpaceModel::CircleGeodesic { .. } => SpacePoint::angle(2.0 * PI * rng.random::<f64>()),
            SpaceModel::TorusL2 => SpacePoint::new(&[2.0 * PI * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>()]),
            SpaceModel::SphereGeodesic { m } | SpaceModel::SphereEuclidean { m } => {
                SpacePoint(gaussian_unit(rng, m + 1))
            }
            SpaceModel::ModelSurface { kappa, .. } if kappa > 0.0 => {
                let r = 1.0 / kappa.sqrt();
                SpacePoint(gaussian_unit(rng, 3).into_iter().map(|x| x * r).collect())
            }
            SpaceModel::ModelSurface { kappa, disk_radius } => {
                // Hyperbolic area element ∝ sinh(a r): invert the radial CDF.
                let a = (-kappa).sqrt();
                let u: f64 = rng.random();
                let r = (1.0 + u * ((a * disk_radius).cosh() - 1.0)).acosh() / a;
                let theta = 2.0 * PI * rng.random::<f64>();
                hyperboloid_point(kappa, r, theta)
            }
            SpaceModel::EuclideanDisk { m, radius } => {
                let dir = gaussian_unit(rng, m);
                let r = radius * rng.random::<f64>().powf(1.0 / m as f64);
                SpacePoint(dir.into_iter().map(|x| x * r).collect())
            }
        }
    }

    /// Pairwise distance matrix of `points`.
    pub fn distance_matrix(&self, points: &[SpacePoint]) -> Result<DistanceMatrix> {
        for p in points {
            self.check_point(p)?;
        }
        if points.is_empty() {
            return Err(Error::TooFewPoints { required: 1, got: 0 });
        }
        let m = DistanceMatrix::from_fn_unchecked(points.len(), |i, j| self.distance_unchecked(&points[i], &points[j]));
        DistanceMatrix::from_flat(m.size(), m.as_slice().to_vec())
    }
}

/// The point at geodesic distance `r` from the apex `(1/√-κ, 0, 0)` of the
/// hyperboloid model, in direction `theta`.
pub fn hyperboloid_point(kappa: f64, r: f64, theta: f64) -> SpacePoint {
    let a = (-kappa).sqrt();
    let (c, s) = ((a * r).cosh() / a, (a * r).sinh() / a);
    SpacePoint::new(&[c, s * theta.cos(), s * theta.sin()])
}

impl Space for SpaceModel {
    type Point = SpacePoint;

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> SpacePoint {
        self.draw_point(rng)
    }

    fn dist(&self, a: &SpacePoint, b: &SpacePoint) -> f64 {
        self.distance_unchecked(a, b)
    }

    fn describe(&self) -> String {
        self.to_string()
    }

    fn is_angular(&self) -> bool {
        matches!(
            self,
            SpaceModel::CircleGeodesic { .. }
                | SpaceModel::SphereGeodesic { .. }
                | SpaceModel::TorusL2
                | SpaceModel::ModelSurface { .. }
        )
    }
}

impl fmt::Display for SpaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SpaceModel::CircleGeodesic { lambda } if lambda == PI => write!(f, "s1"),
            SpaceModel::CircleGeodesic { lambda } => write!(f, "s1:lambda={lambda}"),
            SpaceModel::SphereGeodesic { m } => write!(f, "sphere:m={m}"),
            SpaceModel::SphereEuclidean { m } => write!(f, "sphere-e:m={m}"),
            SpaceModel::TorusL2 => write!(f, "torus"),
            SpaceModel::ModelSurface { kappa, disk_radius } if kappa < 0.0 => {
                write!(f, "mk:kappa={kappa}:R={disk_radius}")
            }
            SpaceModel::ModelSurface { kappa, .. } => write!(f, "mk:kappa={kappa}"),
            SpaceModel::EuclideanDisk { m, radius } => write!(f, "disk:m={m}:R={radius}"),
        }
    }
}

/// Splits `name:key=value:key=value` (also accepting `,` between pairs).
pub(crate) fn parse_descriptor(s: &str) -> Result<(String, Vec<(String, String)>)> {
    let s = s.trim();
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n, r),
        None => (s, ""),
    };
    let mut params = Vec::new();
    for part in rest.split([':', ',']).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidDescriptor(format!("{s}: expected key=value, got {part:?}")))?;
        params.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok((name.to_ascii_lowercase(), params))
}

pub(crate) fn param_f64(params: &[(String, String)], key: &str) -> Result<Option<f64>> {
    params
        .iter()
        .find(|(k, _)| k.eq_ignore_ascii_case(key))
        .map(|(_, v)| v.parse::<f64>().map_err(|e| Error::InvalidDescriptor(format!("{key}={v}: {e}"))))
        .transpose()
}

impl FromStr for SpaceModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = parse_descriptor(s)?;
        let get = |k: &str| param_f64(&params, k);
        let dim = |default: usize| -> Result<usize> { Ok(get("m")?.map(|m| m as usize).unwrap_or(default)) };
        let model = match name.as_str() {
            "s1" | "circle" => SpaceModel::CircleGeodesic { lambda: get("lambda")?.unwrap_or(PI) },
            "sphere" | "s2" => SpaceModel::SphereGeodesic { m: dim(2)? },
            "sphere-e" | "s1-e" | "s2-e" => {
                let default = if name == "s1-e" { 1 } else { 2 };
                SpaceModel::SphereEuclidean { m: dim(default)? }
            }
            "torus" | "t2" => SpaceModel::TorusL2,
            "mk" => {
                let kappa = get("kappa")?.ok_or_else(|| Error::InvalidDescriptor(format!("{s}: kappa is required")))?;
                let default_r = if kappa != 0.0 { PI / kappa.abs().sqrt() } else { 1.0 };
                SpaceModel::ModelSurface { kappa, disk_radius: get("r")?.unwrap_or(default_r) }
            }
            "disk" => SpaceModel::EuclideanDisk { m: dim(2)?, radius: get("r")?.unwrap_or(1.0) },
            _ => return Err(Error::InvalidDescriptor(format!("unknown space {s:?}"))),
        };
        model.check()?;
        Ok(model)
    }
}

/// A finite mm-space: a distance matrix with point masses.
#[derive(Debug, Clone)]
pub struct FiniteMmSpace {
    matrix: DistanceMatrix,
    cumulative: Vec<f64>,
}

impl FiniteMmSpace {
    /// `weights` must be positive; they are normalized to a probability.
    pub fn new(matrix: DistanceMatrix, weights: &[f64]) -> Result<Self> {
        if weights.len() != matrix.size() {
            return Err(Error::SizeMismatch { expected: matrix.size(), got: weights.len() });
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidDescriptor("weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Ok(FiniteMmSpace { matrix, cumulative })
    }

    pub fn uniform(matrix: DistanceMatrix) -> Self {
        let n = matrix.size();
        Self::new(matrix, &vec![1.0; n]).expect("uniform weights are valid")
    }

    /// Two points at distance `delta` with masses `alpha` and `1 - alpha`.
    pub fn two_point(alpha: f64, delta: f64) -> Result<Self> {
        let m = DistanceMatrix::from_flat(2, vec![0.0, delta, delta, 0.0])?;
        Self::new(m, &[alpha, 1.0 - alpha])
    }

    pub fn matrix(&self) -> &DistanceMatrix {
        &self.matrix
    }
}

impl Space for FiniteMmSpace {
    type Point = usize;

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1)
    }

    fn dist(&self, a: &usize, b: &usize) -> f64 {
        self.matrix.get(*a, *b)
    }

    fn describe(&self) -> String {
        format!("finite:n={}", self.matrix.size())
    }
}
