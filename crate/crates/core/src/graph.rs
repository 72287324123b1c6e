//! Metric graphs: points live on weighted edges and the distance is the
//! length of a shortest path.
//!
//! Vertex-to-vertex distances are computed once at construction (Dijkstra
//! from every vertex) so point distances reduce to a handful of lookups.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;
use crate::spaces::Space;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

/// A point at distance `offset` from `edges[edge].u` along the edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphPoint {
    pub edge: usize,
    pub offset: f64,
}

/// A cycle declared by a family constructor, as a set of edge indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DeclaredCycle {
    pub length: f64,
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct MetricGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    vertex_dist: Vec<f64>,
    cumulative: Vec<f64>,
    cycles: Vec<DeclaredCycle>,
    warnings: Vec<String>,
    label: String,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: usize,
    edges: Vec<(usize, usize, f64)>,
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl MetricGraph {
    /// Builds a connected metric graph. Self-loops and parallel edges are
    /// allowed; every length must be positive.
    pub fn new(vertex_count: usize, edges: Vec<Edge>) -> Result<Self> {
        if vertex_count == 0 || edges.is_empty() {
            return Err(Error::InvalidDescriptor("graph needs at least one edge".into()));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.u >= vertex_count || e.v >= vertex_count {
                return Err(Error::InvalidDescriptor(format!("edge {i} has an endpoint out of range")));
            }
            if !(e.length > 0.0 && e.length.is_finite()) {
                return Err(Error::InvalidDescriptor(format!("edge {i} has non-positive length")));
            }
        }
        let mut adj = vec![Vec::new(); vertex_count];
        for e in &edges {
            adj[e.u].push((e.v, e.length));
            adj[e.v].push((e.u, e.length));
        }
        let mut vertex_dist = Vec::with_capacity(vertex_count * vertex_count);
        for s in 0..vertex_count {
            let row = dijkstra(&adj, s);
            if row.iter().any(|d| d.is_infinite()) {
                return Err(Error::InvalidDescriptor("graph is not connected".into()));
            }
            vertex_dist.extend(row);
        }
        // Exact symmetry; Dijkstra sums can differ in the last bit.
        for i in 0..vertex_count {
            for j in (i + 1)..vertex_count {
                let m = vertex_dist[i * vertex_count + j].min(vertex_dist[j * vertex_count + i]);
                vertex_dist[i * vertex_count + j] = m;
                vertex_dist[j * vertex_count + i] = m;
            }
        }
        let mut acc = 0.0;
        let cumulative = edges
            .iter()
            .map(|e| {
                acc += e.length;
                acc
            })
            .collect();
        Ok(MetricGraph {
            vertex_count,
            edges,
            vertex_dist,
            cumulative,
            cycles: Vec::new(),
            warnings: Vec::new(),
            label: "graph".into(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_length(&self) -> f64 {
        *self.cumulative.last().expect("nonempty")
    }

    /// First Betti number `E − V + 1` of the underlying connected graph.
    pub fn betti_number(&self) -> usize {
        self.edges.len() + 1 - self.vertex_count
    }

    pub fn declared_cycles(&self) -> &[DeclaredCycle] {
        &self.cycles
    }

    /// Non-fatal notes from the family constructor (violated hypotheses).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    #[inline]
    pub fn vertex_distance(&self, a: usize, b: usize) -> f64 {
        self.vertex_dist[a * self.vertex_count + b]
    }

    /// The vertex distance table as a distance matrix.
    pub fn vertex_matrix(&self) -> DistanceMatrix {
        DistanceMatrix::from_flat_unchecked(self.vertex_count, self.vertex_dist.clone())
    }

    /// Any point representing vertex `v`.
    pub fn vertex_point(&self, v: usize) -> Option<GraphPoint> {
        self.edges.iter().enumerate().find_map(|(i, e)| {
            if e.u == v {
                Some(GraphPoint { edge: i, offset: 0.0 })
            } else if e.v == v {
                Some(GraphPoint { edge: i, offset: e.length })
            } else {
                None
            }
        })
    }

    pub fn check_point(&self, p: &GraphPoint) -> Result<()> {
        let e = self.edges.get(p.edge).ok_or_else(|| Error::InvalidPoint(format!("edge {} does not exist", p.edge)))?;
        if !(p.offset >= 0.0 && p.offset <= e.length) {
            return Err(Error::InvalidPoint(format!(
                "offset {} outside [0, {}] on edge {}",
                p.offset, e.length, p.edge
            )));
        }
        Ok(())
    }

    pub fn point_distance(&self, p: &GraphPoint, q: &GraphPoint) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.point_distance_unchecked(p, q))
    }

    #[inline]
    pub(crate) fn point_distance_unchecked(&self, p: &GraphPoint, q: &GraphPoint) -> f64 {
        // fixed argument order keeps the result bit-for-bit symmetric
        let (p, q) = if (q.edge, q.offset) < (p.edge, p.offset) { (q, p) } else { (p, q) };
        let e1 = self.edges[p.edge];
        let e2 = self.edges[q.edge];
        let (a1, b1) = (p.offset, e1.length - p.offset);
        let (a2, b2) = (q.offset, e2.length - q.offset);
        let d = |x: usize, y: usize| self.vertex_distance(x, y);
        let around = (a1 + d(e1.u, e2.u) + a2)
            .min(a1 + d(e1.u, e2.v) + b2)
            .min(b1 + d(e1.v, e2.u) + a2)
            .min(b1 + d(e1.v, e2.v) + b2);
        if p.edge == q.edge {
            around.min((p.offset - q.offset).abs())
        } else {
            around
        }
    }

    /// Uniform draws with respect to total edge length.
    pub fn sample_graph<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<GraphPoint> {
        (0..count).map(|_| self.draw_point(rng)).collect()
    }

    pub fn draw_point<R: Rng + ?Sized>(&self, rng: &mut R) -> GraphPoint {
        let t = rng.random::<f64>() * self.total_length();
        let edge = self.cumulative.partition_point(|&c| c <= t).min(self.edges.len() - 1);
        let offset = rng.random::<f64>() * self.edges[edge].length;
        GraphPoint { edge, offset }
    }

    /// Whether `p` lies on one of the edges in `edges` (vertices included).
    pub fn point_on_edges(&self, p: &GraphPoint, edges: &[usize]) -> bool {
        if edges.contains(&p.edge) {
            return true;
        }
        let e = self.edges[p.edge];
        let vertex = if p.offset == 0.0 {
            Some(e.u)
        } else if p.offset == e.length {
            Some(e.v)
        } else {
            None
        };
        vertex.is_some_and(|v| edges.iter().any(|&i| self.edges[i].u == v || self.edges[i].v == v))
    }

    pub fn to_json(&self) -> String {
        let g =
            GraphJson { vertices: self.vertex_count, edges: self.edges.iter().map(|e| (e.u, e.v, e.length)).collect() };
        serde_json::to_string(&g).expect("plain data")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: GraphJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let edges = g.edges.into_iter().map(|(u, v, length)| Edge { u, v, length }).collect();
        Ok(Self::new(g.vertices, edges)?.with_label("graph-file"))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(HeapItem(0.0, source));
    while let Some(HeapItem(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(HeapItem(nd, v));
            }
        }
    }
    dist
}

impl Space for MetricGraph {
    type Point = GraphPoint;

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> GraphPoint {
        self.draw_point(rng)
    }

    fn dist(&self, a: &GraphPoint, b: &GraphPoint) -> f64 {
        self.point_distance_unchecked(a, b)
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

/// Where a tree-of-cycles step attaches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Attach {
    Vertex(usize),
    Edge(usize),
}

/// One step of a tree-of-cycles construction. Vertices and edges are
/// numbered in creation order, starting from the lone vertex 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttachStep {
    /// A cycle of the given length through a vertex, or glued along an
    /// existing edge (the new path closes the cycle).
    Cycle { length: f64, at: Attach },
    /// A pendant edge hanging from a vertex.
    Branch { length: f64, at: usize },
}

/// The constructors for the graph families studied in this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphFamily {
    /// Circles of the given circumferences sharing one point.
    WedgeOfCircles {
        circumferences: Vec<f64>,
    },
    /// A cycle with pendant edges ("flares") attached at the given angles,
    /// in radians: angle `a` sits at arc length `a / 2π · circumference`.
    CycleWithFlares {
        circumference: f64,
        attach_angles: Vec<f64>,
        flare_length: f64,
    },
    /// Cycles sharing one common path of length `alpha`.
    GluedCycles {
        lengths: Vec<f64>,
        alpha: f64,
    },
    TreeOfCycles {
        steps: Vec<AttachStep>,
    },
    /// A single cycle split into `segments` equal edges.
    Cycle {
        circumference: f64,
        segments: usize,
    },
}

struct Builder {
    vertices: usize,
    edges: Vec<Edge>,
    cycles: Vec<DeclaredCycle>,
    warnings: Vec<String>,
}

impl Builder {
    fn new() -> Self {
        Builder { vertices: 1, edges: Vec::new(), cycles: Vec::new(), warnings: Vec::new() }
    }

    fn vertex(&mut self) -> usize {
        self.vertices += 1;
        self.vertices - 1
    }

    fn edge(&mut self, u: usize, v: usize, length: f64) -> usize {
        self.edges.push(Edge { u, v, length });
        self.edges.len() - 1
    }

    /// Path from `u` to `v` split into `pieces` equal edges.
    fn path(&mut self, u: usize, v: usize, length: f64, pieces: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(pieces);
        let mut prev = u;
        for i in 0..pieces {
            let next = if i + 1 == pieces { v } else { self.vertex() };
            out.push(self.edge(prev, next, length / pieces as f64));
            prev = next;
        }
        out
    }

    fn finish(self, label: String) -> Result<MetricGraph> {
        let mut g = MetricGraph::new(self.vertices, self.edges)?;
        g.cycles = self.cycles;
        g.warnings = self.warnings;
        g.label = label;
        Ok(g)
    }
}

fn positive(x: f64, what: &str) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::InvalidDescriptor(format!("{what} must be positive, got {x}")))
    }
}

impl GraphFamily {
    pub fn build(&self) -> Result<MetricGraph> {
        let mut b = Builder::new();
        match self {
            GraphFamily::WedgeOfCircles { circumferences } => {
                if circumferences.is_empty() {
                    return Err(Error::InvalidDescriptor("wedge needs at least one circle".into()));
                }
                for &c in circumferences {
                    positive(c, "circumference")?;
                    let edges = b.path(0, 0, c, 4);
                    b.cycles.push(DeclaredCycle { length: c, edges });
                }
            }
            GraphFamily::CycleWithFlares { circumference, attach_angles, flare_length } => {
                let c = positive(*circumference, "circumference")?;
                positive(*flare_length, "flare length")?;
                let mut pos: Vec<f64> = attach_angles
                    .iter()
                    .map(|a| a.rem_euclid(2.0 * std::f64::consts::PI) / (2.0 * std::f64::consts::PI) * c)
                    .collect();
                pos.sort_by(f64::total_cmp);
                pos.dedup();
                if pos.is_empty() {
                    return Err(Error::InvalidDescriptor("flares need at least one attach angle".into()));
                }
                // Vertex 0 sits at the first attachment point.
                let shift = pos[0];
                let rel: Vec<f64> = pos.iter().map(|p| p - shift).collect();
                let mut anchors = vec![0];
                for _ in 1..rel.len() {
                    anchors.push(b.vertex());
                }
                let mut cycle_edges = Vec::new();
                for i in 0..rel.len() {
                    let next = if i + 1 == rel.len() { c } else { rel[i + 1] };
                    let to = anchors[(i + 1) % anchors.len()];
                    cycle_edges.extend(b.path(anchors[i], to, next - rel[i], 2));
                }
                b.cycles.push(DeclaredCycle { length: c, edges: cycle_edges });
                for &a in &anchors {
                    let tip = b.vertex();
                    b.edge(a, tip, *flare_length);
                }
            }
            GraphFamily::GluedCycles { lengths, alpha } => {
                let alpha = positive(*alpha, "alpha")?;
                if lengths.len() < 2 {
                    return Err(Error::InvalidDescriptor("glued cycles need at least two lengths".into()));
                }
                let q = b.vertex();
                let shared = b.edge(0, q, alpha);
                for &l in lengths {
                    if !(l > alpha) {
                        return Err(Error::InvalidDescriptor(format!(
                            "cycle length {l} must exceed the shared path {alpha}"
                        )));
                    }
                    let mut edges = vec![shared];
                    edges.extend(b.path(0, q, l - alpha, 3));
                    b.cycles.push(DeclaredCycle { length: l, edges });
                }
                let min = lengths.iter().copied().fold(f64::INFINITY, f64::min);
                if alpha >= min / 3.0 {
                    b.warnings.push(format!(
                        "shared path {alpha} is not below a third of the shortest cycle ({min}); corner recovery is not guaranteed"
                    ));
                }
            }
            GraphFamily::TreeOfCycles { steps } => {
                for (i, step) in steps.iter().enumerate() {
                    match *step {
                        AttachStep::Cycle { length, at } => {
                            positive(length, "cycle length")?;
                            let edges = match at {
                                Attach::Vertex(v) => {
                                    if v >= b.vertices {
                                        return Err(Error::InvalidDescriptor(format!("step {i}: no vertex {v}")));
                                    }
                                    b.path(v, v, length, 4)
                                }
                                Attach::Edge(e) => {
                                    let edge = *b
                                        .edges
                                        .get(e)
                                        .ok_or_else(|| Error::InvalidDescriptor(format!("step {i}: no edge {e}")))?;
                                    if !(length > edge.length) {
                                        return Err(Error::InvalidDescriptor(format!(
                                            "step {i}: cycle length {length} must exceed edge length {}",
                                            edge.length
                                        )));
                                    }
                                    let mut edges = vec![e];
                                    edges.extend(b.path(edge.u, edge.v, length - edge.length, 3));
                                    edges
                                }
                            };
                            b.cycles.push(DeclaredCycle { length, edges });
                        }
                        AttachStep::Branch { length, at } => {
                            positive(length, "branch length")?;
                            if at >= b.vertices {
                                return Err(Error::InvalidDescriptor(format!("step {i}: no vertex {at}")));
                            }
                            let tip = b.vertex();
                            b.edge(at, tip, length);
                        }
                    }
                }
                let mut ls: Vec<f64> = b.cycles.iter().map(|c| c.length).collect();
                ls.sort_by(f64::total_cmp);
                if ls.windows(2).any(|w| w[0] == w[1]) {
                    b.warnings.push("cycle lengths are not distinct; corners may coincide".into());
                }
            }
            GraphFamily::Cycle { circumference, segments } => {
                positive(*circumference, "circumference")?;
                if *segments == 0 {
                    return Err(Error::InvalidDescriptor("cycle needs at least one segment".into()));
                }
                let edges = b.path(0, 0, *circumference, *segments);
                b.cycles.push(DeclaredCycle { length: *circumference, edges });
            }
        }
        b.finish(self.to_string())
    }
}

fn fmt_list(xs: &[f64], sep: &str) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFamily::WedgeOfCircles { circumferences } => {
                write!(f, "wedge:{}", fmt_list(circumferences, ","))
            }
            GraphFamily::CycleWithFlares { circumference, attach_angles, flare_length } => {
                write!(f, "flares:c={circumference},angles={},L={flare_length}", fmt_list(attach_angles, ";"))
            }
            GraphFamily::GluedCycles { lengths, alpha } => {
                write!(f, "glued:{}:alpha={alpha}", fmt_list(lengths, ","))
            }
            GraphFamily::TreeOfCycles { steps } => {
                let s: Vec<String> = steps
                    .iter()
                    .map(|s| match *s {
                        AttachStep::Cycle { length, at: Attach::Vertex(v) } => format!("c={length}@v{v}"),
                        AttachStep::Cycle { length, at: Attach::Edge(e) } => format!("c={length}@e{e}"),
                        AttachStep::Branch { length, at } => format!("t={length}@v{at}"),
                    })
                    .collect();
                write!(f, "tree:{}", s.join(";"))
            }
            GraphFamily::Cycle { circumference, segments } => {
                write!(f, "cycle:c={circumference},segments={segments}")
            }
        }
    }
}

fn num(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| Error::InvalidDescriptor(format!("{s:?}: {e}")))
}

fn index(s: &str) -> Result<usize> {
    s.trim().parse::<usize>().map_err(|e| Error::InvalidDescriptor(format!("{s:?}: {e}")))
}

fn parse_step(s: &str) -> Result<AttachStep> {
    let bad =
        || Error::InvalidDescriptor(format!("tree step {s:?}: expected c=<len>@v<i>, c=<len>@e<i> or t=<len>@v<i>"));
    let (kind, rest) = s.split_once('=').ok_or_else(bad)?;
    let (len, at) = rest.split_once('@').ok_or_else(bad)?;
    let length = num(len)?;
    let at = at.trim();
    match (kind.trim(), at.chars().next()) {
        ("c", Some('v')) => Ok(AttachStep::Cycle { length, at: Attach::Vertex(index(&at[1..])?) }),
        ("c", Some('e')) => Ok(AttachStep::Cycle { length, at: Attach::Edge(index(&at[1..])?) }),
        ("t", Some('v')) => Ok(AttachStep::Branch { length, at: index(&at[1..])? }),
        _ => Err(bad()),
    }
}

impl FromStr for GraphFamily {
    type Err = Error;

    /// `wedge:3.5,4.5`, `flares:c=6.2832,k=4,L=1` (or `angles=0;1.57;…`),
    /// `glued:3.5,4.5:alpha=0.5`, `tree:c=3@v0;t=1@v2;c=4@e5`,
    /// `cycle:c=8,segments=8`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let kv = |part: &str| -> Option<(String, String)> {
            part.split_once('=').map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        };
        match name {
            "wedge" => {
                Ok(GraphFamily::WedgeOfCircles { circumferences: rest.split(',').map(num).collect::<Result<_>>()? })
            }
            "glued" => {
                let (lens, a) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidDescriptor(format!("{s}: expected glued:<l1>,<l2>:alpha=<a>")))?;
                let alpha = match kv(a) {
                    Some((k, v)) if k == "alpha" => num(&v)?,
                    _ => return Err(Error::InvalidDescriptor(format!("{s}: missing alpha"))),
                };
                Ok(GraphFamily::GluedCycles { lengths: lens.split(',').map(num).collect::<Result<_>>()?, alpha })
            }
            "flares" => {
                let (mut c, mut k, mut l, mut angles) = (None, None, None, None);
                for part in rest.split([',', ':']).filter(|p| !p.is_empty()) {
                    match kv(part) {
                        Some((key, v)) if key == "c" => c = Some(num(&v)?),
                        Some((key, v)) if key == "k" => k = Some(index(&v)?),
                        Some((key, v)) if key == "L" || key == "l" => l = Some(num(&v)?),
                        Some((key, v)) if key == "angles" => {
                            angles = Some(v.split(';').map(num).collect::<Result<Vec<_>>>()?)
                        }
                        _ => return Err(Error::InvalidDescriptor(format!("{s}: unexpected {part:?}"))),
                    }
                }
                let attach_angles = match (angles, k) {
                    (Some(a), _) => a,
                    (None, Some(k)) if k > 0 => {
                        (0..k).map(|i| 2.0 * std::f64::consts::PI * i as f64 / k as f64).collect()
                    }
                    _ => return Err(Error::InvalidDescriptor(format!("{s}: give k=<count> or angles=<a;b;…>"))),
                };
                Ok(GraphFamily::CycleWithFlares {
                    circumference: c.unwrap_or(2.0 * std::f64::consts::PI),
                    attach_angles,
                    flare_length: l.unwrap_or(1.0),
                })
            }
            "tree" => Ok(GraphFamily::TreeOfCycles {
                steps: rest.split(';').filter(|p| !p.trim().is_empty()).map(parse_step).collect::<Result<_>>()?,
            }),
            "cycle" => {
                let (mut c, mut segments) = (None, 4);
                for part in rest.split([',', ':']).filter(|p| !p.is_empty()) {
                    match kv(part) {
                        Some((key, v)) if key == "c" => c = Some(num(&v)?),
                        Some((key, v)) if key == "segments" => segments = index(&v)?,
                        _ => return Err(Error::InvalidDescriptor(format!("{s}: unexpected {part:?}"))),
                    }
                }
                let circumference = c.ok_or_else(|| Error::InvalidDescriptor(format!("{s}: missing c")))?;
                Ok(GraphFamily::Cycle { circumference, segments })
            }
            _ => Err(Error::InvalidDescriptor(format!("unknown graph family {s:?}"))),
        }
    }
}
