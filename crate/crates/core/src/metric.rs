//! Finite pseudo-metric spaces stored as dense distance matrices.
//!
//! A [`DistanceMatrix`] is the common currency of the crate: model spaces and
//! metric graphs produce them, the principal-diagram routine and the
//! Vietoris-Rips oracle consume them. Pseudo-metrics (zero off-diagonal
//! entries, as produced by tuples with repeated points) are accepted.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack on the triangle inequality, scaled by the largest entry.
pub const TRIANGLE_REL_TOL: f64 = 1e-9;

/// One violated pseudo-metric axiom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Asymmetry {
        i: usize,
        j: usize,
    },
    Negative {
        i: usize,
        j: usize,
    },
    NonzeroDiagonal {
        i: usize,
    },
    /// `d(i, k) > d(i, j) + d(j, k)`.
    Triangle {
        i: usize,
        j: usize,
        k: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Asymmetry { i, j } => write!(f, "asymmetry at ({i}, {j})"),
            Violation::Negative { i, j } => write!(f, "negative entry at ({i}, {j})"),
            Violation::NonzeroDiagonal { i } => write!(f, "nonzero diagonal at {i}"),
            Violation::Triangle { i, j, k } => write!(f, "triangle at ({i}, {j}, {k})"),
        }
    }
}

/// Symmetric, nonnegative `n × n` matrix with zero diagonal satisfying the
/// triangle inequality up to [`TRIANGLE_REL_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

/// Diameter, radius and separation of a finite space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub diameter: f64,
    pub radius: f64,
    /// `+∞` for a single point.
    pub separation: f64,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates a square array of rows.
    pub fn validate(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::TooFewPoints { required: 1, got: 0 });
        }
        let mut d = Vec::with_capacity(n * n);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, len: r.len(), expected: n });
            }
            d.extend_from_slice(r);
        }
        Self::from_flat(n, d)
    }

    /// Validates a flat row-major array of length `n * n`.
    pub fn from_flat(n: usize, d: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewPoints { required: 1, got: 0 });
        }
        if d.len() != n * n {
            return Err(Error::NotSquare { row: d.len() / n.max(1), len: d.len(), expected: n * n });
        }
        if let Some(pos) = d.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { i: pos / n, j: pos % n });
        }
        let violations = axiom_violations(n, &d);
        if violations.is_empty() {
            Ok(DistanceMatrix { n, d })
        } else {
            Err(Error::AxiomViolation(violations))
        }
    }

    /// Builds a matrix without checking the axioms. Callers guarantee the
    /// entries come from a genuine (pseudo-)metric.
    pub(crate) fn from_flat_unchecked(n: usize, d: Vec<f64>) -> Self {
        debug_assert_eq!(d.len(), n * n);
        DistanceMatrix { n, d }
    }

    /// Builds a matrix from a pairwise distance function on `n` items.
    pub(crate) fn from_fn_unchecked(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        DistanceMatrix { n, d }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.d
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.d.chunks(self.n)
    }

    pub fn max_entry(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    /// The matrix of the tuple `(x_{indices[0]}, …, x_{indices[m-1]})`.
    /// Repeated indices produce zero off-diagonal entries.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&index) = indices.iter().find(|&&i| i >= self.n) {
            return Err(Error::IndexOutOfRange { index, size: self.n });
        }
        if indices.is_empty() {
            return Err(Error::TooFewPoints { required: 1, got: 0 });
        }
        let m = indices.len();
        Ok(Self::from_fn_unchecked(m, |a, b| self.get(indices[a], indices[b])))
    }

    /// Multiplies every entry by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        DistanceMatrix { n: self.n, d: self.d.iter().map(|x| x * c).collect() }
    }

    pub fn stats(&self) -> MetricStats {
        let n = self.n;
        let diameter = self.max_entry();
        let radius = self.rows().map(|r| r.iter().copied().fold(0.0, f64::max)).fold(f64::INFINITY, f64::min);
        let mut separation = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                separation = separation.min(self.get(i, j));
            }
        }
        MetricStats { diameter, radius, separation }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatrixJson { n: self.n, d: self.d.clone() }).expect("plain data")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: MatrixJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_flat(m.n, m.d)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in self.rows() {
            let line = r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    /// Parses `n` lines of `n` comma-separated decimals (no header).
    pub fn from_csv(s: &str) -> Result<Self> {
        Self::validate(&parse_csv_rows(s)?)
    }
}

/// Parses comma-separated numeric rows, skipping blank lines.
pub fn parse_csv_rows(s: &str) -> Result<Vec<Vec<f64>>> {
    s.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(ln, l)| {
            l.split(',')
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {:?}: {e}", ln + 1, f.trim())))
                })
                .collect()
        })
        .collect()
}

fn axiom_violations(n: usize, d: &[f64]) -> Vec<Violation> {
    let mut out = Vec::new();
    let at = |i: usize, j: usize| d[i * n + j];
    for i in 0..n {
        if at(i, i) != 0.0 {
            out.push(Violation::NonzeroDiagonal { i });
        }
        for j in 0..n {
            if at(i, j) < 0.0 {
                out.push(Violation::Negative { i, j });
            }
            if i < j && at(i, j) != at(j, i) {
                out.push(Violation::Asymmetry { i, j });
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    let tol = TRIANGLE_REL_TOL * d.iter().copied().fold(0.0, f64::max);
    for i in 0..n {
        for k in (i + 1)..n {
            for j in 0..n {
                if j != i && j != k && at(i, k) > at(i, j) + at(j, k) + tol {
                    out.push(Violation::Triangle { i, j, k });
                }
            }
        }
    }
    out
}
