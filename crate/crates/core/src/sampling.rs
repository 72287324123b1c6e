//! Monte-Carlo estimates of persistence sets and persistence measures.
//!
//! Tuples are split into fixed-size chunks. Chunk `c` draws from a ChaCha8
//! stream seeded with `(seed, c)`, and chunk results are concatenated in
//! chunk order, so the output depends only on the seed and never on the
//! number of workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;
use crate::oracle;
use crate::principal::{principal_point, vanishes_below_principal};
use crate::spaces::Space;

pub const DEFAULT_TUPLES: u64 = 1_000_000;
pub const DEFAULT_CHUNK: u64 = 16_384;
const DISTINCT_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TupleMode {
    /// Independent draws; repeated points are allowed.
    #[default]
    WithReplacement,
    /// Redraw any point at distance zero from an earlier one.
    Distinct,
}

#[derive(Debug, Clone)]
pub struct SampleConfig {
    pub n: usize,
    pub k: usize,
    pub tuples: u64,
    pub seed: u64,
    pub workers: usize,
    pub mode: TupleMode,
    pub chunk_size: u64,
}

impl SampleConfig {
    pub fn new(n: usize, k: usize, tuples: u64, seed: u64) -> Self {
        SampleConfig { n, k, tuples, seed, workers: 1, mode: TupleMode::default(), chunk_size: DEFAULT_CHUNK }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn mode(mut self, mode: TupleMode) -> Self {
        self.mode = mode;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceSetSample {
    pub space: String,
    pub n: usize,
    pub k: usize,
    pub tuples_drawn: u64,
    /// One point per nontrivial diagram (the most persistent one when the
    /// oracle returns several).
    pub nontrivial_points: Vec<(f64, f64)>,
    pub trivial_count: u64,
    pub seed: u64,
    /// Remaining points of multi-point oracle diagrams.
    pub secondary_points: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    tuples: u64,
    trivial: u64,
    seed: u64,
    space: String,
    n: usize,
    k: usize,
}

impl PersistenceSetSample {
    pub fn nontrivial_fraction(&self) -> f64 {
        if self.tuples_drawn == 0 {
            0.0
        } else {
            self.nontrivial_points.len() as f64 / self.tuples_drawn as f64
        }
    }

    /// CSV with header `t_b,t_d`, nontrivial points only.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.nontrivial_points.len() * 40 + 8);
        s.push_str("t_b,t_d\n");
        for (b, d) in &self.nontrivial_points {
            s.push_str(&format!("{b},{d}\n"));
        }
        s
    }

    pub fn sidecar_json(&self) -> String {
        serde_json::to_string_pretty(&Sidecar {
            tuples: self.tuples_drawn,
            trivial: self.trivial_count,
            seed: self.seed,
            space: self.space.clone(),
            n: self.n,
            k: self.k,
        })
        .expect("plain data")
    }

    /// Rebuilds a sample from its CSV and, if available, its sidecar. Without
    /// a sidecar the sample is treated as having no trivial tuples.
    pub fn from_csv(csv: &str, sidecar: Option<&str>) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in csv.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("t_b")) {
                continue;
            }
            let (b, d) =
                line.split_once(',').ok_or_else(|| Error::Parse(format!("line {}: expected t_b,t_d", lineno + 1)))?;
            let parse =
                |x: &str| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)));
            points.push((parse(b)?, parse(d)?));
        }
        let meta = match sidecar {
            Some(s) => serde_json::from_str::<Sidecar>(s).map_err(|e| Error::Parse(e.to_string()))?,
            None => Sidecar { tuples: points.len() as u64, trivial: 0, seed: 0, space: "unknown".into(), n: 4, k: 1 },
        };
        if meta.tuples != meta.trivial + points.len() as u64 {
            return Err(Error::Parse(format!(
                "sidecar counts {} tuples but {} trivial + {} points",
                meta.tuples,
                meta.trivial,
                points.len()
            )));
        }
        Ok(PersistenceSetSample {
            space: meta.space,
            n: meta.n,
            k: meta.k,
            tuples_drawn: meta.tuples,
            nontrivial_points: points,
            trivial_count: meta.trivial,
            seed: meta.seed,
            secondary_points: Vec::new(),
        })
    }
}

#[derive(Default)]
struct ChunkResult {
    points: Vec<(f64, f64)>,
    secondary: Vec<(f64, f64)>,
    trivial: u64,
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn draw_tuple<S: Space, R: Rng>(
    space: &S,
    rng: &mut R,
    n: usize,
    mode: TupleMode,
    out: &mut Vec<S::Point>,
) -> Result<()> {
    out.clear();
    for _ in 0..n {
        let mut p = space.draw(rng);
        if mode == TupleMode::Distinct {
            let mut attempts = 0;
            while out.iter().any(|q| space.dist(q, &p) == 0.0) {
                attempts += 1;
                if attempts == DISTINCT_ATTEMPTS {
                    return Err(Error::DegenerateSpace(format!(
                        "{} gave {DISTINCT_ATTEMPTS} coincident draws in a row",
                        space.describe()
                    )));
                }
                p = space.draw(rng);
            }
        }
        out.push(p);
    }
    Ok(())
}

fn run_chunk<S: Space>(space: &S, cfg: &SampleConfig, chunk: u64) -> Result<ChunkResult> {
    let start = chunk * cfg.chunk_size;
    let count = cfg.chunk_size.min(cfg.tuples - start);
    let n = cfg.n;
    let mut rng = chunk_rng(cfg.seed, chunk);
    let mut pts: Vec<S::Point> = Vec::with_capacity(n);
    let mut d = vec![0.0; n * n];
    let principal = n == 2 * cfg.k + 2;
    let mut res = ChunkResult::default();
    for _ in 0..count {
        draw_tuple(space, &mut rng, n, cfg.mode, &mut pts)?;
        for i in 0..n {
            for j in (i + 1)..n {
                let x = space.dist(&pts[i], &pts[j]);
                d[i * n + j] = x;
                d[j * n + i] = x;
            }
        }
        if principal {
            match principal_point(&d, n) {
                Some(p) => res.points.push(p),
                None => res.trivial += 1,
            }
        } else {
            let m = DistanceMatrix::from_flat_unchecked(n, d.clone());
            let dgm = oracle::vr_diagram(&m, cfg.k)?;
            let best = dgm
                .points
                .iter()
                .enumerate()
                .max_by(|a, b| (a.1 .1 - a.1 .0).total_cmp(&(b.1 .1 - b.1 .0)).then(b.0.cmp(&a.0)));
            match best {
                Some((i, &p)) => {
                    res.points.push(p);
                    res.secondary.extend(dgm.points.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| *q));
                }
                None => res.trivial += 1,
            }
        }
    }
    Ok(res)
}

/// Draws `cfg.tuples` tuples of `cfg.n` points from `space` and records the
/// degree-`cfg.k` diagram of each.
///
/// `n = 2k + 2` uses the principal shortcut; other `n ≤ 12` go through the
/// brute-force oracle, and `n < 2k + 2` is trivially empty.
pub fn sample_persistence_set<S: Space>(space: &S, cfg: &SampleConfig) -> Result<PersistenceSetSample> {
    let (n, k) = (cfg.n, cfg.k);
    if n == 0 || (n != 2 * k + 2 && n > oracle::MAX_POINTS) {
        return Err(Error::UnsupportedCombination { n, k });
    }
    let mut sample = PersistenceSetSample {
        space: space.describe(),
        n,
        k,
        tuples_drawn: cfg.tuples,
        nontrivial_points: Vec::new(),
        trivial_count: 0,
        seed: cfg.seed,
        secondary_points: Vec::new(),
    };
    if vanishes_below_principal(n, k) {
        sample.trivial_count = cfg.tuples;
        return Ok(sample);
    }
    let chunk_size = cfg.chunk_size.max(1);
    let cfg = SampleConfig { chunk_size, ..cfg.clone() };
    let chunks = cfg.tuples.div_ceil(chunk_size);
    let results: Vec<ChunkResult> = if cfg.workers <= 1 {
        (0..chunks).map(|c| run_chunk(space, &cfg, c)).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::TooLarge(format!("cannot start {} workers: {e}", cfg.workers)))?;
        pool.install(|| (0..chunks).into_par_iter().map(|c| run_chunk(space, &cfg, c)).collect::<Result<_>>())?
    };
    let total: usize = results.iter().map(|r| r.points.len()).sum();
    sample.nontrivial_points.reserve_exact(total);
    for r in results {
        sample.nontrivial_points.extend(r.points);
        sample.secondary_points.extend(r.secondary);
        sample.trivial_count += r.trivial;
    }
    Ok(sample)
}

/// Mass of an axis-aligned box `[b0, b1] × [d0, d1]` under some measure.
pub trait BinMass {
    fn bin_mass(&self, b: (f64, f64), d: (f64, f64)) -> f64;
    fn total_mass(&self) -> f64;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram2D {
    pub bins_b: usize,
    pub bins_d: usize,
    pub range_b: (f64, f64),
    pub range_d: (f64, f64),
    /// Row-major: `counts[i * bins_d + j]` for birth bin `i`, death bin `j`.
    pub counts: Vec<u64>,
    pub empty_mass: u64,
    /// Nontrivial points outside a caller-supplied range.
    pub outside: u64,
    pub total: u64,
}

impl Histogram2D {
    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.bins_d + j]
    }

    pub fn nontrivial(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn width_b(&self) -> f64 {
        (self.range_b.1 - self.range_b.0) / self.bins_b as f64
    }

    fn width_d(&self) -> f64 {
        (self.range_d.1 - self.range_d.0) / self.bins_d as f64
    }

    pub fn bin_b(&self, i: usize) -> (f64, f64) {
        let w = self.width_b();
        (self.range_b.0 + i as f64 * w, self.range_b.0 + (i + 1) as f64 * w)
    }

    pub fn bin_d(&self, j: usize) -> (f64, f64) {
        let w = self.width_d();
        (self.range_d.0 + j as f64 * w, self.range_d.0 + (j + 1) as f64 * w)
    }

    /// Counts as CSV: one row per birth bin, one column per death bin.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for i in 0..self.bins_b {
            let row: Vec<String> = (0..self.bins_d).map(|j| self.count(i, j).to_string()).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    /// Everything except the counts.
    pub fn metadata_json(&self) -> String {
        serde_json::to_string_pretty(&serde_json::json!({
            "bins_b": self.bins_b,
            "bins_d": self.bins_d,
            "range_b": [self.range_b.0, self.range_b.1],
            "range_d": [self.range_d.0, self.range_d.1],
            "empty_mass": self.empty_mass,
            "outside": self.outside,
            "total": self.total,
        }))
        .expect("plain data")
    }
}

impl BinMass for Histogram2D {
    /// Uniform within each bin.
    fn bin_mass(&self, b: (f64, f64), d: (f64, f64)) -> f64 {
        let (wb, wd) = (self.width_b(), self.width_d());
        let mut m = 0.0;
        for i in 0..self.bins_b {
            let (b0, b1) = self.bin_b(i);
            let ob = (b1.min(b.1) - b0.max(b.0)).max(0.0);
            if ob == 0.0 {
                continue;
            }
            for j in 0..self.bins_d {
                let (d0, d1) = self.bin_d(j);
                let od = (d1.min(d.1) - d0.max(d.0)).max(0.0);
                m += self.count(i, j) as f64 * (ob / wb) * (od / wd);
            }
        }
        m
    }

    fn total_mass(&self) -> f64 {
        self.nontrivial() as f64
    }
}

/// Bins the nontrivial points. Without `range` the bounding box of the data
/// is used (widened slightly when degenerate).
pub fn histogram(
    sample: &PersistenceSetSample,
    bins_b: usize,
    bins_d: usize,
    range: Option<((f64, f64), (f64, f64))>,
) -> Histogram2D {
    let bins_b = bins_b.max(1);
    let bins_d = bins_d.max(1);
    let pts = &sample.nontrivial_points;
    let (range_b, range_d) = range.unwrap_or_else(|| {
        let bound = |f: fn(&(f64, f64)) -> f64| {
            let lo = pts.iter().map(f).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if lo == hi {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        (bound(|p| p.0), bound(|p| p.1))
    });
    let mut h = Histogram2D {
        bins_b,
        bins_d,
        range_b,
        range_d,
        counts: vec![0; bins_b * bins_d],
        empty_mass: sample.trivial_count,
        outside: 0,
        total: 0,
    };
    let index = |x: f64, (lo, hi): (f64, f64), bins: usize| -> Option<usize> {
        if !(x >= lo && x <= hi) {
            return None;
        }
        Some((((x - lo) / (hi - lo) * bins as f64) as usize).min(bins - 1))
    };
    for &(b, d) in pts {
        match (index(b, range_b, bins_b), index(d, range_d, bins_d)) {
            (Some(i), Some(j)) => h.counts[i * bins_d + j] += 1,
            _ => h.outside += 1,
        }
    }
    h.total = h.nontrivial() + h.empty_mass;
    h
}

/// A density given pointwise, integrated over bins by midpoint quadrature.
pub struct DensityFn<F> {
    f: F,
    total: f64,
    subdivisions: usize,
}

impl<F: Fn(f64, f64) -> f64> DensityFn<F> {
    /// `total` is the integral of `f` over its support.
    pub fn with_total(f: F, total: f64) -> Self {
        DensityFn { f, total, subdivisions: 16 }
    }

    /// Normalizer computed numerically over the given box.
    pub fn integrated_over(f: F, range_b: (f64, f64), range_d: (f64, f64), resolution: usize) -> Self {
        let mut me = DensityFn { f, total: 1.0, subdivisions: resolution.max(1) };
        me.total = me.bin_mass(range_b, range_d);
        me.subdivisions = 16;
        me
    }

    pub fn subdivisions(mut self, s: usize) -> Self {
        self.subdivisions = s.max(1);
        self
    }
}

impl<F: Fn(f64, f64) -> f64> BinMass for DensityFn<F> {
    fn bin_mass(&self, b: (f64, f64), d: (f64, f64)) -> f64 {
        let s = self.subdivisions;
        let (hb, hd) = ((b.1 - b.0) / s as f64, (d.1 - d.0) / s as f64);
        let mut acc = 0.0;
        for i in 0..s {
            let x = b.0 + (i as f64 + 0.5) * hb;
            for j in 0..s {
                acc += (self.f)(x, d.0 + (j as f64 + 0.5) * hd);
            }
        }
        acc * hb * hd
    }

    fn total_mass(&self) -> f64 {
        self.total
    }
}

/// L¹ distance between the histogram, conditioned on nontrivial diagrams,
/// and the bin-averaged normalized density.
///
/// Fails with `RegionMismatch` if the histogram range misses more than 1%
/// of the density's mass.
pub fn density_l1_error(hist: &Histogram2D, density: &impl BinMass) -> Result<f64> {
    let n = hist.nontrivial();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let total = density.total_mass();
    let mut captured = 0.0;
    let mut err = 0.0;
    for i in 0..hist.bins_b {
        let b = hist.bin_b(i);
        for j in 0..hist.bins_d {
            let mass = density.bin_mass(b, hist.bin_d(j)) / total;
            captured += mass;
            err += (hist.count(i, j) as f64 / n as f64 - mass).abs();
        }
    }
    if captured < 0.99 {
        return Err(Error::RegionMismatch(format!("bins capture {:.4} of the density's mass", captured)));
    }
    Ok(err)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    /// Largest `t_d − t_b` in the diagram.
    TotalPersistence,
    Birth,
    Death,
}

/// Right-continuous empirical CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCdf {
    /// Jump locations, increasing, with the CDF value just after each jump.
    pub steps: Vec<(f64, f64)>,
}

impl StepCdf {
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        values.sort_by(f64::total_cmp);
        let n = values.len() as f64;
        let mut steps: Vec<(f64, f64)> = Vec::new();
        for (i, v) in values.iter().enumerate() {
            let p = (i + 1) as f64 / n;
            match steps.last_mut() {
                Some(last) if last.0 == *v => last.1 = p,
                _ => steps.push((*v, p)),
            }
        }
        Ok(StepCdf { steps })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.steps.partition_point(|s| s.0 <= t);
        if i == 0 {
            0.0
        } else {
            self.steps[i - 1].1
        }
    }

    /// `∫ |F(t) − G(t)| dt`.
    pub fn l1_distance(&self, other: &StepCdf) -> f64 {
        let mut xs: Vec<f64> = self.steps.iter().chain(&other.steps).map(|s| s.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs.windows(2).map(|w| (self.eval(w[0]) - other.eval(w[0])).abs() * (w[1] - w[0])).sum()
    }
}

/// CDF of a diagram coordinate under the empirical persistence measure.
/// Empty diagrams contribute the value 0.
pub fn coordinate_cdf(sample: &PersistenceSetSample, coordinate: Coordinate) -> Result<StepCdf> {
    if sample.tuples_drawn == 0 {
        return Err(Error::EmptySample);
    }
    let f = |&(b, d): &(f64, f64)| match coordinate {
        Coordinate::TotalPersistence => d - b,
        Coordinate::Birth => b,
        Coordinate::Death => d,
    };
    let mut values: Vec<f64> = sample.nontrivial_points.iter().map(f).collect();
    values.resize(values.len() + sample.trivial_count as usize, 0.0);
    StepCdf::from_values(values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointMeasure {
    pub empty_mass: f64,
    pub point_mass: f64,
    pub point: (f64, f64),
}

/// Exact degree-0 persistence measure of n draws from two points at
/// distance `delta` weighted `alpha` and `1 − alpha`: the diagram is empty
/// when all draws coincide and `{(0, δ)}` otherwise.
pub fn two_point_measure(alpha: f64, delta: f64, n: u32) -> Result<TwoPointMeasure> {
    if !(alpha > 0.0 && alpha < 1.0) || !(delta > 0.0) || n == 0 {
        return Err(Error::InvalidDescriptor(format!(
            "need 0 < alpha < 1, delta > 0, n ≥ 1 (got {alpha}, {delta}, {n})"
        )));
    }
    let n = n as i32;
    let empty_mass = alpha.powi(n) + (1.0 - alpha).powi(n);
    Ok(TwoPointMeasure { empty_mass, point_mass: 1.0 - empty_mass, point: (0.0, delta) })
}
